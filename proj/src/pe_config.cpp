#include "ecgra/pe_config.hpp"

#include <string>

namespace ecgra {

int other_port(int dir, int k) {
    int n = 0;
    for (int d = 0; d < 4; ++d) {
        if (d == dir) continue;
        if (n == k) return d;
        ++n;
    }
    throw PreconditionViolation("other_port lane out of range");
}

int other_port_lane(int dir, int other) {
    int n = 0;
    for (int d = 0; d < 4; ++d) {
        if (d == dir) continue;
        if (d == other) return n;
        ++n;
    }
    throw PreconditionViolation("other_port_lane: port is its own side");
}

namespace {

Word get_bits(Word w, int hi, int lo) {
    return (w >> lo) & ((hi - lo == 31) ? 0xFFFFFFFFu : ((1u << (hi - lo + 1)) - 1u));
}

void put_bits(Word& w, int hi, int lo, Word value) {
    const Word mask = (hi - lo == 31) ? 0xFFFFFFFFu : ((1u << (hi - lo + 1)) - 1u);
    if (value & ~mask)
        throw InvalidConfig("config field value out of range");
    w |= (value & mask) << lo;
}

} // namespace

void validate_config(const PEConfig& cfg) {
    auto fail = [&](const std::string& msg) {
        throw InvalidConfig("pe " + std::to_string(cfg.pe_id) + ": " + msg);
    };
    if (cfg.pe_id > 63) fail("pe_id out of range");
    if (cfg.cmp_op != CmpOp::Disabled) {
        // Comparator PEs are isolated: the comparator result is the datapath
        // output and the PE cannot double as a merge.
        if (cfg.dp_mux_sel != DpMuxSel::Cmp)
            fail("comparator enabled but datapath mux does not select it");
        if (cfg.join_mode == JoinMergeMode::Merge)
            fail("comparator PE cannot operate in merge mode");
    }
    if (cfg.dp_mux_sel == DpMuxSel::Cmp && cfg.cmp_op == CmpOp::Disabled)
        fail("datapath mux selects a disabled comparator");
    if (cfg.alu_fb_sel) {
        if (cfg.delay_d < 1) fail("immediate feedback requires delay_d >= 1");
        if (cfg.eb_gate_mask & (1u << GATE_FU_A))
            fail("immediate feedback replaces input A; its buffer must be gated");
    }
    if (cfg.dp_mux_sel == DpMuxSel::Mux && cfg.join_mode == JoinMergeMode::JoinNoControl)
        fail("datapath mux needs a select: merge mode or a control input");
    if (cfg.join_mode == JoinMergeMode::Merge) {
        if (cfg.dp_mux_sel != DpMuxSel::Mux)
            fail("merge mode drives the datapath mux; another selection is contradictory");
        if (cfg.alu_fb_sel)
            fail("merge mode cannot combine with immediate feedback");
    }
    if (cfg.init_valids != 0 && cfg.fu_fork_mask == 0)
        fail("bootstrap valid with no output-fork destination");
    // B1/B2 routing requires the control-driven valid demux.
    bool branch_routed = (cfg.fu_fork_mask != 0);
    bool uses_branch_valids = false;
    for (int d = 0; d < 4; ++d) {
        OutMuxSel sel = cfg.out_mux_sel[d];
        if (sel == OutMuxSel::B1 || sel == OutMuxSel::B2) uses_branch_valids = true;
    }
    if (uses_branch_valids && cfg.join_mode != JoinMergeMode::JoinWithControl &&
        !(cfg.init_valids & 0b110))
        fail("branch valid routed but join mode has no control input");
    (void)branch_routed;
    // Out-port muxes selecting an FU variant require the FU fork to target
    // that port, and vice versa.
    for (int d = 0; d < 4; ++d) {
        OutMuxSel sel = cfg.out_mux_sel[d];
        bool is_fu = sel == OutMuxSel::FU || sel == OutMuxSel::FUDelayed ||
                     sel == OutMuxSel::B1 || sel == OutMuxSel::B2;
        bool fork_targets = cfg.fu_fork_mask & (1u << d);
        if (fork_targets && !is_fu)
            fail(std::string("fu fork targets port ") + dir_name(d) +
                 " but its mux selects another source");
        if (is_fu && !fork_targets)
            fail(std::string("out port ") + dir_name(d) +
                 " selects the FU but the fu fork does not target it");
    }
    // Input forks may only target enabled buffers / coherent out ports.
    for (int p = 0; p < 4; ++p) {
        uint8_t m = cfg.in_fork_mask[p];
        if (m == 0) continue;
        if (!(cfg.eb_gate_mask & (1u << p)))
            fail(std::string("input port ") + dir_name(p) + " forks but its buffer is gated");
        if (m & (1u << FORK_FU_A)) {
            if (!(cfg.eb_gate_mask & (1u << GATE_FU_A)))
                fail("fork targets gated FU input A");
            if (static_cast<int>(cfg.fu_in_a_sel) != p)
                fail(std::string("input port ") + dir_name(p) +
                     " forks to FU input A it does not drive");
        }
        if (m & (1u << FORK_FU_B)) {
            if (!(cfg.eb_gate_mask & (1u << GATE_FU_B)))
                fail("fork targets gated FU input B");
            if (static_cast<int>(cfg.fu_in_b_sel) != p)
                fail(std::string("input port ") + dir_name(p) +
                     " forks to FU input B it does not drive");
        }
        if ((m & (1u << FORK_FU_CTRL)) &&
            (cfg.join_mode != JoinMergeMode::JoinWithControl ||
             static_cast<int>(cfg.fu_ctrl_sel) != p))
            fail(std::string("input port ") + dir_name(p) +
                 " forks to the control input it does not drive");
        for (int k = 0; k < 3; ++k) {
            if (!(m & (1u << (FORK_OUT_P1 + k)))) continue;
            int out = other_port(p, k);
            OutMuxSel sel = cfg.out_mux_sel[out];
            bool coherent = (sel == OutMuxSel::InP1 || sel == OutMuxSel::InP2 ||
                             sel == OutMuxSel::InP3) &&
                            other_port(out, static_cast<int>(sel)) == p;
            if (!coherent)
                fail(std::string("input port ") + dir_name(p) + " forks to out port " +
                     dir_name(out) + " whose mux selects another source");
        }
    }
    if (cfg.fu_fork_mask != 0) {
        // The FU actually runs: its operand buffers must be live.
        if (!cfg.alu_fb_sel && !(cfg.eb_gate_mask & (1u << GATE_FU_A)))
            fail("fu is used but input buffer A is gated");
        if (!(cfg.eb_gate_mask & (1u << GATE_FU_B)))
            fail("fu is used but input buffer B is gated");
    }
    if (cfg.fu_fork_mask & (1u << FUFORK_FB1)) {
        if (cfg.fu_in_a_sel != FuInSel::Feedback)
            fail("FB1 enabled but input A does not select feedback");
        if (!(cfg.eb_gate_mask & (1u << GATE_FU_A)))
            fail("FB1 targets gated FU input A");
    }
    if (cfg.fu_fork_mask & (1u << FUFORK_FB2)) {
        if (cfg.fu_in_b_sel != FuInSel::Feedback)
            fail("FB2 enabled but input B does not select feedback");
        if (!(cfg.eb_gate_mask & (1u << GATE_FU_B)))
            fail("FB2 targets gated FU input B");
    }
    if (cfg.fu_in_a_sel == FuInSel::Feedback && !cfg.alu_fb_sel &&
        !(cfg.fu_fork_mask & (1u << FUFORK_FB1)))
        fail("input A selects feedback but FB1 is not forked");
    if (cfg.fu_in_b_sel == FuInSel::Feedback && !(cfg.fu_fork_mask & (1u << FUFORK_FB2)))
        fail("input B selects feedback but FB2 is not forked");
}

std::array<Word, 5> pack_config(const PEConfig& cfg) {
    validate_config(cfg);
    std::array<Word, 5> w{0, 0, 0, 0, 0};
    put_bits(w[0], 5, 0, cfg.pe_id);
    put_bits(w[0], 11, 6, cfg.eb_gate_mask);
    put_bits(w[0], 15, 12, static_cast<Word>(cfg.alu_op));
    put_bits(w[0], 16, 16, cfg.alu_fb_sel ? 1 : 0);
    put_bits(w[0], 18, 17, static_cast<Word>(cfg.cmp_op));
    put_bits(w[0], 20, 19, static_cast<Word>(cfg.join_mode));
    put_bits(w[0], 22, 21, static_cast<Word>(cfg.dp_mux_sel));
    put_bits(w[0], 25, 23, static_cast<Word>(cfg.fu_in_a_sel));
    put_bits(w[0], 28, 26, static_cast<Word>(cfg.fu_in_b_sel));
    put_bits(w[0], 30, 29, static_cast<Word>(cfg.fu_ctrl_sel));
    w[1] = cfg.constant;
    w[2] = cfg.init_data_reg;
    put_bits(w[3], 2, 0, cfg.init_valids);
    put_bits(w[3], 8, 3, cfg.fu_fork_mask);
    put_bits(w[3], 16, 9, cfg.delay_d);
    for (int d = 0; d < 4; ++d)
        put_bits(w[3], 19 + 3 * d, 17 + 3 * d, static_cast<Word>(cfg.out_mux_sel[d]));
    for (int p = 0; p < 4; ++p)
        put_bits(w[4], 5 + 6 * p, 6 * p, cfg.in_fork_mask[p]);
    return w;
}

PEConfig decode_config(const std::array<Word, 5>& words) {
    auto field_check = [&](Word v, Word max, const char* name) {
        if (v > max)
            throw InvalidConfig(std::string("config image: ") + name + " encoding out of range");
        return v;
    };
    if (get_bits(words[0], 31, 31) != 0 || get_bits(words[3], 31, 29) != 0 ||
        get_bits(words[4], 31, 24) != 0)
        throw InvalidConfig("config image: reserved bits must be zero");
    PEConfig cfg;
    cfg.pe_id = static_cast<uint8_t>(get_bits(words[0], 5, 0));
    cfg.eb_gate_mask = static_cast<uint8_t>(get_bits(words[0], 11, 6));
    cfg.alu_op = static_cast<AluOp>(field_check(get_bits(words[0], 15, 12), 7, "alu_op"));
    cfg.alu_fb_sel = get_bits(words[0], 16, 16) != 0;
    cfg.cmp_op = static_cast<CmpOp>(field_check(get_bits(words[0], 18, 17), 2, "cmp_op"));
    cfg.join_mode =
        static_cast<JoinMergeMode>(field_check(get_bits(words[0], 20, 19), 2, "join_mode"));
    cfg.dp_mux_sel =
        static_cast<DpMuxSel>(field_check(get_bits(words[0], 22, 21), 2, "dp_mux_sel"));
    cfg.fu_in_a_sel =
        static_cast<FuInSel>(field_check(get_bits(words[0], 25, 23), 5, "fu_in_a_sel"));
    cfg.fu_in_b_sel =
        static_cast<FuInSel>(field_check(get_bits(words[0], 28, 26), 5, "fu_in_b_sel"));
    cfg.fu_ctrl_sel = static_cast<FuCtrlSel>(get_bits(words[0], 30, 29));
    cfg.constant = words[1];
    cfg.init_data_reg = words[2];
    cfg.init_valids = static_cast<uint8_t>(get_bits(words[3], 2, 0));
    cfg.fu_fork_mask = static_cast<uint8_t>(get_bits(words[3], 8, 3));
    cfg.delay_d = static_cast<uint8_t>(get_bits(words[3], 16, 9));
    for (int d = 0; d < 4; ++d)
        cfg.out_mux_sel[d] =
            static_cast<OutMuxSel>(get_bits(words[3], 19 + 3 * d, 17 + 3 * d));
    for (int p = 0; p < 4; ++p)
        cfg.in_fork_mask[p] = static_cast<uint8_t>(get_bits(words[4], 5 + 6 * p, 6 * p));
    validate_config(cfg);
    return cfg;
}

} // namespace ecgra
