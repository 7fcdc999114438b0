#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <deque>
#include <random>
#include <vector>

#include "ecgra/pe.hpp"

using namespace ecgra;

namespace {

// Bit-level shift reference: one position at a time.
Word shift_ref(Word a, unsigned n, bool left) {
    for (unsigned i = 0; i < (n & 31u); ++i) {
        if (left)
            a = (a & 0x7FFFFFFFu) << 1;
        else
            a = a >> 1;
    }
    return a;
}

PEConfig streaming_add_pe() {
    // Both operands buffered, result forked to the north port.
    PEConfig c;
    c.eb_gate_mask = (1u << GATE_FU_A) | (1u << GATE_FU_B);
    c.alu_op = AluOp::Add;
    c.fu_fork_mask = 1u << FUFORK_N;
    c.out_mux_sel[DIR_N] = OutMuxSel::FU;
    return c;
}

} // namespace

TEST_CASE("alu_eval: wrapping integer ops") {
    CHECK(alu_eval(AluOp::Add, 2, 3) == 5);
    CHECK(alu_eval(AluOp::Mult, 0x00010000u, 0x00010000u) == 0); // low-32 wraparound
    CHECK(alu_eval(AluOp::Shr, as_word(-8), 1) == 0x7FFFFFFCu);  // logical
    CHECK(alu_eval(AluOp::Sub, 1, 2) == 0xFFFFFFFFu);
    CHECK(alu_eval(AluOp::Shl, 1, 33) == 2); // low 5 bits of b
    CHECK(alu_eval(AluOp::And, 0xF0F0F0F0u, 0x0FF00FF0u) == 0x00F000F0u);
    CHECK(alu_eval(AluOp::Or, 0xF0u, 0x0Fu) == 0xFFu);
    CHECK(alu_eval(AluOp::Xor, 0xFFu, 0x0Fu) == 0xF0u);
}

TEST_CASE("alu_eval: shifts match a bit-level reference") {
    std::mt19937 rng(7);
    for (int i = 0; i < 2000; ++i) {
        Word a = rng();
        Word b = rng();
        CHECK(alu_eval(AluOp::Shl, a, b) == shift_ref(a, b, true));
        CHECK(alu_eval(AluOp::Shr, a, b) == shift_ref(a, b, false));
    }
}

TEST_CASE("cmp_eval: signed predicates") {
    CHECK(cmp_eval(CmpOp::GtZero, 5, 0));
    CHECK(cmp_eval(CmpOp::EqZero, 7, 7));
    CHECK_FALSE(cmp_eval(CmpOp::GtZero, as_word(-1), 0)); // relu-style gate is signed
    CHECK(cmp_eval(CmpOp::GtZero, 0, as_word(-1)));
    CHECK_FALSE(cmp_eval(CmpOp::EqZero, 1, 2));
    CHECK_THROWS_AS(cmp_eval(CmpOp::Disabled, 0, 0), InvalidConfig);
}

TEST_CASE("fu_settle/commit: steady streaming add") {
    PEConfig cfg = streaming_add_pe();
    FUState st;
    st.reset(cfg);
    st.eb_a.commit(Word{2}, false);
    st.eb_b.commit(Word{3}, false);

    FUPlan p = fu_settle(cfg, st, false, false, /*fork_ready=*/true);
    CHECK(p.join.fire);
    CHECK(p.result == 5);
    fu_commit(cfg, st, p, std::nullopt, std::nullopt);
    CHECK(st.data_reg == 5);
    CHECK(st.v_plain);

    // next cycle the result leaves through the fork
    p = fu_settle(cfg, st, false, false, true);
    CHECK(p.fork_fire);
    CHECK(p.vout_fu);
    CHECK_FALSE(p.vout_fu_d);
}

TEST_CASE("fu_settle: join stalls when the fork is blocked") {
    PEConfig cfg = streaming_add_pe();
    FUState st;
    st.reset(cfg);
    st.eb_a.commit(Word{1}, false);
    st.eb_b.commit(Word{1}, false);
    FUPlan p = fu_settle(cfg, st, false, false, /*fork_ready=*/false);
    CHECK_FALSE(p.join.fire);
    CHECK_FALSE(p.fork_fire);
}

TEST_CASE("fu: branch valid demux, exactly one side per firing") {
    PEConfig cfg;
    cfg.eb_gate_mask = (1u << GATE_FU_A) | (1u << GATE_FU_B);
    cfg.join_mode = JoinMergeMode::JoinWithControl;
    cfg.alu_op = AluOp::Or;
    cfg.fu_fork_mask = (1u << FUFORK_E) | (1u << FUFORK_W);
    cfg.out_mux_sel[DIR_E] = OutMuxSel::B1;
    cfg.out_mux_sel[DIR_W] = OutMuxSel::B2;
    FUState st;
    st.reset(cfg);

    for (bool ctrl : {true, false, true}) {
        st.eb_a.commit(Word{42}, false);
        st.eb_b.commit(Word{0}, false);
        FUPlan p = fu_settle(cfg, st, /*ctrl_valid=*/true, ctrl, true);
        REQUIRE(p.join.fire);
        fu_commit(cfg, st, p, std::nullopt, std::nullopt);
        CHECK(st.v_b1 == ctrl);
        CHECK(st.v_b2 == !ctrl);
        p = fu_settle(cfg, st, false, false, true);
        REQUIRE(p.fork_fire);
        CHECK(p.vout_b1 == ctrl);
        CHECK(p.vout_b2 == !ctrl);
        CHECK((p.vout_b1 ^ p.vout_b2)); // never both
        fu_commit(cfg, st, p, std::nullopt, std::nullopt);
    }
}

TEST_CASE("fu: accumulator emits the fold on every delay_d-th firing") {
    // Immediate feedback, delay 4, init 0, fed 1,2,3,4 -> one delayed token
    // of value 10; the next block restarts from the initial value.
    PEConfig cfg;
    cfg.eb_gate_mask = (1u << GATE_FU_B);
    cfg.alu_op = AluOp::Add;
    cfg.alu_fb_sel = true;
    cfg.delay_d = 4;
    cfg.init_data_reg = 0;
    cfg.fu_fork_mask = 1u << FUFORK_S;
    cfg.out_mux_sel[DIR_S] = OutMuxSel::FUDelayed;
    FUState st;
    st.reset(cfg);

    std::deque<Word> feed{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<Word> emitted;
    int firings = 0;
    for (int cyc = 0; cyc < 32; ++cyc) {
        FUPlan p = fu_settle(cfg, st, false, false, true);
        if (p.join.fire) ++firings;
        if (p.vout_fu_d) emitted.push_back(st.data_reg);
        std::optional<Word> push;
        if (!feed.empty() && st.eb_b.ready()) {
            push = feed.front();
            feed.pop_front();
        }
        fu_commit(cfg, st, p, std::nullopt, push);
    }
    CHECK(firings == 8);
    // reference fold over the two blocks
    REQUIRE(emitted.size() == 2);
    CHECK(emitted[0] == 1 + 2 + 3 + 4);
    CHECK(emitted[1] == 5 + 6 + 7 + 8);
}

TEST_CASE("pe_settle: pass-through W to E has exactly one cycle of latency") {
    PEConfig cfg;
    cfg.eb_gate_mask = 1u << GATE_IN_W;
    cfg.in_fork_mask[DIR_W] = 1u << (FORK_OUT_P1 + other_port_lane(DIR_W, DIR_E));
    cfg.out_mux_sel[DIR_E] =
        static_cast<OutMuxSel>(other_port_lane(DIR_E, DIR_W)); // InP slot of W
    validate_config(cfg);

    PEState st;
    st.reset(cfg);
    PEEnv env;
    env.out_dest_ready = {true, true, true, true};

    std::vector<Word> in{10, 20, 30, 40, 50};
    std::vector<Word> out;
    size_t fed = 0;
    for (int cyc = 0; cyc < 12; ++cyc) {
        PEPlan p = pe_settle(cfg, st, env);
        if (p.out_valid[DIR_E]) out.push_back(p.out_data[DIR_E]);
        pe_commit(cfg, st, p);
        if (fed < in.size() && st.in_eb[DIR_W].ready())
            st.in_eb[DIR_W].commit(in[fed++], false);
    }
    CHECK(out == in); // one token per cycle once flowing, order preserved
}

TEST_CASE("pe_settle: input fork feeds FU and a cardinal output with the same stream") {
    // North input forks to FU operand A and the south output; operand B is
    // the constant 0 and the FU just adds, so all three token traces agree.
    PEConfig cfg;
    cfg.eb_gate_mask = (1u << GATE_IN_N) | (1u << GATE_FU_A) | (1u << GATE_FU_B);
    cfg.in_fork_mask[DIR_N] =
        (1u << FORK_FU_A) | (1u << (FORK_OUT_P1 + other_port_lane(DIR_N, DIR_S)));
    cfg.out_mux_sel[DIR_S] = static_cast<OutMuxSel>(other_port_lane(DIR_S, DIR_N));
    cfg.fu_in_a_sel = FuInSel::N;
    cfg.fu_in_b_sel = FuInSel::Const;
    cfg.constant = 0;
    cfg.alu_op = AluOp::Add;
    cfg.fu_fork_mask = 1u << FUFORK_E;
    cfg.out_mux_sel[DIR_E] = OutMuxSel::FU;
    validate_config(cfg);

    PEState st;
    st.reset(cfg);
    PEEnv env;
    env.out_dest_ready = {true, true, true, true};

    std::mt19937 rng(99);
    std::vector<Word> in;
    for (int i = 0; i < 100; ++i) in.push_back(rng());
    std::vector<Word> south, east;
    size_t fed = 0;
    for (int cyc = 0; cyc < 160; ++cyc) {
        PEPlan p = pe_settle(cfg, st, env);
        if (p.out_valid[DIR_S]) south.push_back(p.out_data[DIR_S]);
        if (p.out_valid[DIR_E]) east.push_back(p.out_data[DIR_E]);
        pe_commit(cfg, st, p);
        if (fed < in.size() && st.in_eb[DIR_N].ready())
            st.in_eb[DIR_N].commit(in[fed++], false);
    }
    CHECK(south == in);
    CHECK(east == in);
}

namespace {

PEConfig random_valid_config(std::mt19937& rng) {
    auto pick = [&](int n) { return static_cast<int>(rng() % n); };
    PEConfig c;
    c.pe_id = static_cast<uint8_t>(pick(64));
    c.constant = rng();
    c.init_data_reg = rng();
    switch (pick(5)) {
    case 0: { // pure routing PE
        int p = pick(4);
        int lane = pick(3);
        c.eb_gate_mask = 1u << p;
        c.in_fork_mask[p] = 1u << (FORK_OUT_P1 + lane);
        int out = other_port(p, lane);
        c.out_mux_sel[out] = static_cast<OutMuxSel>(other_port_lane(out, p));
        break;
    }
    case 1: { // two-operand ALU
        int pa = pick(4);
        int pb = (pa + 1 + pick(3)) % 4;
        c.alu_op = static_cast<AluOp>(pick(8));
        c.eb_gate_mask = (1u << pa) | (1u << pb) | (1u << GATE_FU_A) | (1u << GATE_FU_B);
        c.fu_in_a_sel = static_cast<FuInSel>(pa);
        c.fu_in_b_sel = static_cast<FuInSel>(pb);
        c.in_fork_mask[pa] = 1u << FORK_FU_A;
        c.in_fork_mask[pb] = 1u << FORK_FU_B;
        int out = pick(4);
        c.fu_fork_mask = 1u << out;
        c.out_mux_sel[out] = OutMuxSel::FU;
        break;
    }
    case 2: { // comparator against the constant
        int pa = pick(4);
        c.cmp_op = static_cast<CmpOp>(1 + pick(2));
        c.dp_mux_sel = DpMuxSel::Cmp;
        c.eb_gate_mask = (1u << pa) | (1u << GATE_FU_A) | (1u << GATE_FU_B);
        c.fu_in_a_sel = static_cast<FuInSel>(pa);
        c.fu_in_b_sel = FuInSel::Const;
        c.in_fork_mask[pa] = 1u << FORK_FU_A;
        int out = pick(4);
        c.fu_fork_mask = 1u << out;
        c.out_mux_sel[out] = OutMuxSel::FU;
        break;
    }
    case 3: { // if/else mux with control
        int pa = pick(4);
        int pb = (pa + 1) % 4;
        int pc = (pa + 2) % 4;
        c.join_mode = JoinMergeMode::JoinWithControl;
        c.dp_mux_sel = DpMuxSel::Mux;
        c.eb_gate_mask =
            (1u << pa) | (1u << pb) | (1u << pc) | (1u << GATE_FU_A) | (1u << GATE_FU_B);
        c.fu_in_a_sel = static_cast<FuInSel>(pa);
        c.fu_in_b_sel = static_cast<FuInSel>(pb);
        c.fu_ctrl_sel = static_cast<FuCtrlSel>(pc);
        c.in_fork_mask[pa] = 1u << FORK_FU_A;
        c.in_fork_mask[pb] = 1u << FORK_FU_B;
        c.in_fork_mask[pc] = 1u << FORK_FU_CTRL;
        int out = pick(4);
        c.fu_fork_mask = 1u << out;
        c.out_mux_sel[out] = OutMuxSel::FU;
        break;
    }
    case 4: { // reduction with immediate feedback and delayed valid
        int pb = pick(4);
        c.alu_op = static_cast<AluOp>(pick(8));
        c.alu_fb_sel = true;
        c.delay_d = static_cast<uint8_t>(1 + pick(255));
        c.eb_gate_mask = (1u << pb) | (1u << GATE_FU_B);
        c.fu_in_b_sel = static_cast<FuInSel>(pb);
        c.in_fork_mask[pb] = 1u << FORK_FU_B;
        int out = pick(4);
        c.fu_fork_mask = 1u << out;
        c.out_mux_sel[out] = OutMuxSel::FUDelayed;
        c.init_valids = rng() & 1;
        break;
    }
    }
    return c;
}

} // namespace

TEST_CASE("pack_config: field placement") {
    PEConfig c;
    c.pe_id = 5;
    auto words = pack_config(c);
    CHECK(words[0] == 5);
    CHECK(words[1] == 0);
    CHECK(words[2] == 0);
    CHECK(words[3] == 0);
    CHECK(words[4] == 0);

    c.constant = 0xDEADBEEFu;
    words = pack_config(c);
    CHECK(words[1] == 0xDEADBEEFu);
}

TEST_CASE("pack/decode: round-trip identity on 1000 random valid configs") {
    std::mt19937 rng(20240601);
    for (int i = 0; i < 1000; ++i) {
        PEConfig c = random_valid_config(rng);
        validate_config(c); // generator must only emit valid configs
        auto words = pack_config(c);
        PEConfig back = decode_config(words);
        CHECK(back == c);
        // canonical images survive a second trip bit-exactly
        CHECK(pack_config(back) == words);
    }
}

TEST_CASE("decode_config: rejects bad encodings") {
    PEConfig c;
    c.pe_id = 1;
    auto words = pack_config(c);
    auto bad = words;
    bad[0] |= 1u << 31; // reserved
    CHECK_THROWS_AS(decode_config(bad), InvalidConfig);
    bad = words;
    bad[0] |= 9u << 12; // alu_op encoding 9
    CHECK_THROWS_AS(decode_config(bad), InvalidConfig);
    bad = words;
    bad[4] |= 0xFFu << 24; // reserved
    CHECK_THROWS_AS(decode_config(bad), InvalidConfig);
}

TEST_CASE("validate_config: contradictions are rejected") {
    PEConfig c;
    c.fu_fork_mask = 1u << FUFORK_N; // FU used, but operand buffers gated
    c.out_mux_sel[DIR_N] = OutMuxSel::FU;
    CHECK_THROWS_AS(validate_config(c), InvalidConfig);

    PEConfig b;
    b.eb_gate_mask = (1u << GATE_FU_A) | (1u << GATE_FU_B);
    b.out_mux_sel[DIR_E] = OutMuxSel::B1; // branch valid without control join
    b.fu_fork_mask = 1u << FUFORK_E;
    CHECK_THROWS_AS(validate_config(b), InvalidConfig);

    PEConfig g;
    g.eb_gate_mask = 0;
    g.in_fork_mask[DIR_N] = 1u << FORK_OUT_P1; // fork from a gated buffer
    CHECK_THROWS_AS(validate_config(g), InvalidConfig);

    PEConfig m;
    m.alu_fb_sel = true; // immediate feedback needs delay_d >= 1
    m.eb_gate_mask = 1u << GATE_FU_B;
    m.fu_fork_mask = 1u << FUFORK_S;
    m.out_mux_sel[DIR_S] = OutMuxSel::FU;
    CHECK_THROWS_AS(validate_config(m), InvalidConfig);
}
