#include "ecgra/pe.hpp"

namespace ecgra {

Word alu_eval(AluOp op, Word a, Word b) {
    switch (op) {
    case AluOp::Add: return a + b;
    case AluOp::Sub: return a - b;
    case AluOp::Mult: return a * b;
    case AluOp::Shl: return a << (b & 31u);
    case AluOp::Shr: return a >> (b & 31u);
    case AluOp::And: return a & b;
    case AluOp::Or: return a | b;
    case AluOp::Xor: return a ^ b;
    }
    throw PreconditionViolation("unknown alu op");
}

bool cmp_eval(CmpOp op, Word a, Word b) {
    switch (op) {
    case CmpOp::EqZero: return a == b;
    case CmpOp::GtZero: return as_signed(a) > as_signed(b);
    case CmpOp::Disabled: break;
    }
    throw InvalidConfig("comparator evaluated while disabled");
}

namespace {

bool gate(const PEConfig& cfg, int lane) { return cfg.eb_gate_mask & (1u << lane); }

/// Value feeding ALU operand A. With immediate feedback the register is read
/// directly; at a reduction-block boundary (fire_count wrapped to 0) the
/// initial value is re-injected so back-to-back reductions restart cleanly.
Word operand_a(const PEConfig& cfg, const FUState& st) {
    if (cfg.alu_fb_sel)
        return st.fire_count == 0 ? cfg.init_data_reg : st.data_reg;
    return st.eb_a.head();
}

} // namespace

FUPlan fu_settle(const PEConfig& cfg, const FUState& st, bool ctrl_valid, bool ctrl_bit,
                 bool fork_ready) {
    FUPlan plan;

    const bool va = cfg.alu_fb_sel ? true : st.eb_a.valid();
    const bool vb = st.eb_b.valid();
    plan.join = join_eval(cfg.join_mode, va, vb, ctrl_valid, fork_ready);
    plan.pop_a = plan.join.consume_a && !cfg.alu_fb_sel;
    plan.pop_b = plan.join.consume_b;

    // Output fork: fires when any registered valid is pending and every
    // enabled destination is ready; the per-class valids gate what each
    // destination actually sees.
    const bool reg_valid_any = st.v_plain || st.v_b1 || st.v_b2;
    if (reg_valid_any) {
        ForkResult f = fork_eval(true, cfg.fu_fork_mask, fork_ready ? cfg.fu_fork_mask : 0);
        plan.fork_fire = f.fire;
    }
    plan.vout_fu = plan.fork_fire && st.v_plain;
    plan.vout_fu_d = plan.fork_fire && st.v_dly;
    plan.vout_b1 = plan.fork_fire && st.v_b1;
    plan.vout_b2 = plan.fork_fire && st.v_b2;

    if (plan.join.fire) {
        const Word a = operand_a(cfg, st);
        const Word b = st.eb_b.head();
        switch (cfg.dp_mux_sel) {
        case DpMuxSel::Alu:
            plan.result = alu_eval(cfg.alu_op, a, b);
            break;
        case DpMuxSel::Cmp:
            plan.result = cmp_eval(cfg.cmp_op, a, b) ? 1 : 0;
            break;
        case DpMuxSel::Mux:
            if (cfg.join_mode == JoinMergeMode::Merge)
                plan.result = (*plan.join.merge_sel == 0) ? a : b;
            else
                plan.result = ctrl_bit ? a : b;
            break;
        }
        plan.next_plain = true;
        if (cfg.join_mode == JoinMergeMode::JoinWithControl) {
            plan.next_b1 = ctrl_bit;
            plan.next_b2 = !ctrl_bit;
        }
        if (cfg.delay_d > 0) {
            plan.next_dly = (st.fire_count + 1 == cfg.delay_d);
            plan.next_fire_count =
                static_cast<uint16_t>((st.fire_count + 1) % cfg.delay_d);
        }
    }
    return plan;
}

void fu_commit(const PEConfig& cfg, FUState& st, const FUPlan& plan,
               std::optional<Word> push_a, std::optional<Word> push_b) {
    if (plan.pop_a && !st.eb_a.valid())
        throw PreconditionViolation("fu_commit: stale plan (operand A)");
    if (plan.pop_b && !st.eb_b.valid())
        throw PreconditionViolation("fu_commit: stale plan (operand B)");
    st.eb_a.commit(push_a, plan.pop_a);
    st.eb_b.commit(push_b, plan.pop_b);
    if (plan.join.fire) {
        st.data_reg = plan.result;
        st.v_plain = plan.next_plain;
        st.v_b1 = plan.next_b1;
        st.v_b2 = plan.next_b2;
        st.v_dly = plan.next_dly;
        st.fire_count = plan.next_fire_count;
    } else if (plan.fork_fire) {
        st.v_plain = st.v_b1 = st.v_b2 = st.v_dly = false;
    }
    (void)cfg;
}

PEPlan pe_settle(const PEConfig& cfg, const PEState& st, const PEEnv& env) {
    PEPlan plan;

    // Output-fork destination readiness (all cycle-start facts).
    bool fork_ready = true;
    for (int d = 0; d < 4; ++d)
        if (cfg.fu_fork_mask & (1u << d)) fork_ready &= env.out_dest_ready[d];
    if (cfg.fu_fork_mask & (1u << FUFORK_FB1)) fork_ready &= st.fu.eb_a.ready();
    if (cfg.fu_fork_mask & (1u << FUFORK_FB2)) fork_ready &= st.fu.eb_b.ready();

    // Control input: fed straight from one input port's fork, no buffer.
    const int ctrl_port = static_cast<int>(cfg.fu_ctrl_sel);
    const bool ctrl_used = cfg.join_mode == JoinMergeMode::JoinWithControl;
    bool ctrl_ready = false;
    if (ctrl_used) {
        const bool va = cfg.alu_fb_sel ? true : st.fu.eb_a.valid();
        const bool vb = st.fu.eb_b.valid();
        ctrl_ready = va && vb && fork_ready;
    }

    // Input-port forks: every enabled destination must be ready.
    for (int p = 0; p < 4; ++p) {
        const uint8_t mask = cfg.in_fork_mask[p];
        if (mask == 0 || !gate(cfg, p)) continue;
        if (!st.in_eb[p].valid()) continue;
        bool all_ready = true;
        if (mask & (1u << FORK_FU_A)) all_ready &= st.fu.eb_a.ready();
        if (mask & (1u << FORK_FU_B)) all_ready &= st.fu.eb_b.ready();
        if (mask & (1u << FORK_FU_CTRL)) all_ready &= ctrl_ready;
        for (int k = 0; k < 3; ++k)
            if (mask & (1u << (FORK_OUT_P1 + k)))
                all_ready &= env.out_dest_ready[other_port(p, k)];
        plan.in_fire[p] = all_ready;
    }

    const bool ctrl_valid = ctrl_used && (cfg.in_fork_mask[ctrl_port] & (1u << FORK_FU_CTRL)) &&
                            plan.in_fire[ctrl_port];
    const bool ctrl_bit = ctrl_valid && st.in_eb[ctrl_port].head() != 0;

    plan.fu = fu_settle(cfg, st.fu, ctrl_valid, ctrl_bit, fork_ready);

    // Cardinal out-port wires: pure muxes over fork outputs.
    for (int d = 0; d < 4; ++d) {
        switch (cfg.out_mux_sel[d]) {
        case OutMuxSel::InP1:
        case OutMuxSel::InP2:
        case OutMuxSel::InP3: {
            const int p = other_port(d, static_cast<int>(cfg.out_mux_sel[d]));
            const int lane = FORK_OUT_P1 + other_port_lane(p, d);
            if (plan.in_fire[p] && (cfg.in_fork_mask[p] & (1u << lane))) {
                plan.out_valid[d] = true;
                plan.out_data[d] = st.in_eb[p].head();
            }
            break;
        }
        case OutMuxSel::FU:
            plan.out_valid[d] = plan.fu.vout_fu;
            plan.out_data[d] = st.fu.data_reg;
            break;
        case OutMuxSel::FUDelayed:
            plan.out_valid[d] = plan.fu.vout_fu_d;
            plan.out_data[d] = st.fu.data_reg;
            break;
        case OutMuxSel::B1:
            plan.out_valid[d] = plan.fu.vout_b1;
            plan.out_data[d] = st.fu.data_reg;
            break;
        case OutMuxSel::B2:
            plan.out_valid[d] = plan.fu.vout_b2;
            plan.out_data[d] = st.fu.data_reg;
            break;
        case OutMuxSel::Disabled:
            break;
        }
    }

    // Tokens entering the operand buffers this cycle.
    if (!cfg.alu_fb_sel && gate(cfg, GATE_FU_A)) {
        if (cfg.fu_in_a_sel == FuInSel::Const) {
            if (st.fu.eb_a.ready()) plan.push_a = cfg.constant;
        } else if (cfg.fu_in_a_sel == FuInSel::Feedback) {
            if (plan.fu.fork_fire && (cfg.fu_fork_mask & (1u << FUFORK_FB1)) &&
                plan.fu.vout_fu)
                plan.push_a = st.fu.data_reg;
        } else {
            const int p = static_cast<int>(cfg.fu_in_a_sel);
            if (plan.in_fire[p] && (cfg.in_fork_mask[p] & (1u << FORK_FU_A)))
                plan.push_a = st.in_eb[p].head();
        }
    }
    if (gate(cfg, GATE_FU_B)) {
        if (cfg.fu_in_b_sel == FuInSel::Const) {
            if (st.fu.eb_b.ready()) plan.push_b = cfg.constant;
        } else if (cfg.fu_in_b_sel == FuInSel::Feedback) {
            if (plan.fu.fork_fire && (cfg.fu_fork_mask & (1u << FUFORK_FB2)) &&
                plan.fu.vout_fu)
                plan.push_b = st.fu.data_reg;
        } else {
            const int p = static_cast<int>(cfg.fu_in_b_sel);
            if (plan.in_fire[p] && (cfg.in_fork_mask[p] & (1u << FORK_FU_B)))
                plan.push_b = st.in_eb[p].head();
        }
    }

    plan.any_fire = plan.fu.join.fire || plan.fu.fork_fire;
    for (int p = 0; p < 4; ++p) plan.any_fire |= plan.in_fire[p];
    return plan;
}

void pe_commit(const PEConfig& cfg, PEState& st, const PEPlan& plan) {
    fu_commit(cfg, st.fu, plan.fu, plan.push_a, plan.push_b);
    for (int p = 0; p < 4; ++p)
        if (plan.in_fire[p]) st.in_eb[p].commit(std::nullopt, true);
}

} // namespace ecgra
