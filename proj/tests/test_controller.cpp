#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ecgra/controller.hpp"

using namespace ecgra;

namespace {

PEConfig pass_ns(int pe_id) {
    PEConfig c;
    c.pe_id = static_cast<uint8_t>(pe_id);
    c.eb_gate_mask = 1u << GATE_IN_N;
    c.in_fork_mask[DIR_N] = 1u << (FORK_OUT_P1 + other_port_lane(DIR_N, DIR_S));
    c.out_mux_sel[DIR_S] = static_cast<OutMuxSel>(other_port_lane(DIR_S, DIR_N));
    return c;
}

/// Self-contained counter PE: no cardinal wiring, so any number of them
/// forms a legal kernel. Used to pin the configuration-cycle law.
PEConfig counter_pe(int pe_id) {
    PEConfig c;
    c.pe_id = static_cast<uint8_t>(pe_id);
    c.eb_gate_mask = (1u << GATE_FU_A) | (1u << GATE_FU_B);
    c.alu_op = AluOp::Add;
    c.fu_in_a_sel = FuInSel::Feedback;
    c.fu_in_b_sel = FuInSel::Const;
    c.constant = 1;
    c.init_valids = 1;
    c.fu_fork_mask = 1u << FUFORK_FB1;
    return c;
}

/// Write a kernel's config stream into memory; returns the word count.
Word place_config(MemoryImage& img, Word addr, const std::vector<PEConfig>& cfgs) {
    Word k = 0;
    for (const auto& cfg : cfgs)
        for (Word w : pack_config(cfg)) img.store(addr + 4 * (k++), w);
    return k;
}

struct Rig {
    Fabric fabric{4, 4};
    MemorySystem mem{4};
    Controller ctrl{fabric, mem};
};

} // namespace

TEST_CASE("register file: write then read back") {
    Rig rig;
    rig.ctrl.reg_write(Controller::kRegInBase + 0x0, 0x100);
    CHECK(rig.ctrl.reg_read(Controller::kRegInBase + 0x0) == 0x100);
    rig.ctrl.reg_write(Controller::kRegOutBase + 0x14, 64);
    CHECK(rig.ctrl.reg_read(Controller::kRegOutBase + 0x14) == 64);
    CHECK_THROWS_AS(rig.ctrl.reg_read(0x300), UnknownRegister);
    CHECK_THROWS_AS(rig.ctrl.reg_write(Controller::kRegCounters, 1), UnknownRegister);
}

TEST_CASE("register file: writes while busy are rejected, abort is allowed") {
    Rig rig;
    rig.ctrl.reg_write(Controller::kRegCommand, Controller::kCmdStart);
    CHECK(rig.ctrl.busy());
    CHECK_THROWS_AS(rig.ctrl.reg_write(Controller::kRegInBase, 0x10), BusyWrite);
    rig.ctrl.reg_write(Controller::kRegCommand, Controller::kCmdAbort);
    CHECK_FALSE(rig.ctrl.busy());
}

TEST_CASE("configuration-cycle law: 5 PEs * 5 words + 4") {
    Rig rig;
    std::vector<PEConfig> sixteen, fourteen;
    for (int i = 0; i < 16; ++i) sixteen.push_back(counter_pe(i));
    for (int i = 0; i < 14; ++i) fourteen.push_back(counter_pe(i));

    Word words16 = place_config(rig.mem.image(), 0x0, sixteen);
    rig.ctrl.reg_write(Controller::kRegConfigAddr, 0x0);
    rig.ctrl.reg_write(Controller::kRegConfigWords, words16);
    CHECK(rig.ctrl.fetch_configuration() == 84);
    CHECK(rig.fabric.configured_count() == 16);

    Word words14 = place_config(rig.mem.image(), 0x1000, fourteen);
    rig.ctrl.reg_write(Controller::kRegConfigAddr, 0x1000);
    rig.ctrl.reg_write(Controller::kRegConfigWords, words14);
    CHECK(rig.ctrl.fetch_configuration() == 74);
    CHECK(rig.fabric.configured_count() == 14);

    // relaunch without reconfiguration costs nothing
    rig.ctrl.reg_write(Controller::kRegConfigWords, 0);
    CHECK(rig.ctrl.fetch_configuration() == 0);
}

TEST_CASE("launch with all sizes zero completes immediately") {
    Rig rig;
    ShotRecord shot;
    shot.in.resize(4);
    shot.out.resize(4);
    auto result = rig.ctrl.run_shots({shot}, /*host_overhead=*/0);
    CHECK(result.counters.exec_cycles == 0);
    CHECK(rig.ctrl.done());
    CHECK((rig.ctrl.reg_read(Controller::kRegStatus) & 2) != 0);
}

TEST_CASE("end-to-end pass-through kernel: memory to memory through the fabric") {
    Rig rig;
    // single column kernel: in node 0 -> pe(0..3,0) -> out node 0
    std::vector<PEConfig> col;
    for (int r = 0; r < 4; ++r) col.push_back(pass_ns(r * 4));
    Word nwords = place_config(rig.mem.image(), 0x0, col);

    const Word src = rig.mem.image().interleaved_base();
    const Word dst = src + 0x400;
    for (Word i = 0; i < 8; ++i) rig.mem.image().store(src + 4 * i, 100 + i);

    rig.ctrl.reg_write(Controller::kRegConfigAddr, 0x0);
    rig.ctrl.reg_write(Controller::kRegConfigWords, nwords);

    ShotRecord shot;
    shot.reconfigure = true;
    shot.config_addr = 0x0;
    shot.config_words = nwords;
    shot.in.assign(4, {});
    shot.out.assign(4, {});
    shot.in[0] = {src, 8, 4};
    shot.out[0] = {dst, 8, 4};
    auto result = rig.ctrl.run_shots({shot}, /*host_overhead=*/20);

    for (Word i = 0; i < 8; ++i) CHECK(rig.mem.image().load(dst + 4 * i) == 100 + i);
    // 8 tokens, 4-hop fabric latency, node fill/drain on both sides
    CHECK(result.counters.exec_cycles >= 13);
    CHECK(result.counters.exec_cycles <= 20);
    CHECK(result.counters.config_cycles == 24); // 4 PEs
    CHECK(result.counters.total_cycles == result.counters.config_cycles +
                                              result.counters.exec_cycles +
                                              result.counters.control_cycles);
    CHECK(result.counters.out_writes == 8);
    // gating soundness: unconfigured PEs saw zero active cycles
    for (int i = 0; i < 16; ++i) {
        if (i % 4 == 0)
            CHECK(result.counters.pe_active_cycles[i] > 0);
        else
            CHECK(result.counters.pe_active_cycles[i] == 0);
    }
}

TEST_CASE("deadlock: a starved join trips the stall window with a dump") {
    Rig rig;
    // pe(0,0) forks the stream into FU operand A; operand B never arrives
    // because nothing feeds it. The output node waits forever.
    PEConfig starved;
    starved.pe_id = 12; // row 3, column 0
    starved.eb_gate_mask = (1u << GATE_IN_N) | (1u << GATE_FU_A) | (1u << GATE_FU_B);
    starved.fu_in_a_sel = FuInSel::N;
    starved.fu_in_b_sel = FuInSel::E; // east border is idle: no tokens, ever
    starved.in_fork_mask[DIR_N] = 1u << FORK_FU_A;
    starved.alu_op = AluOp::Add;
    starved.fu_fork_mask = 1u << FUFORK_S;
    starved.out_mux_sel[DIR_S] = OutMuxSel::FU;
    // feed column: three pass PEs above it
    std::vector<PEConfig> cfgs{pass_ns(0), pass_ns(4), pass_ns(8), starved};
    Word nwords = place_config(rig.mem.image(), 0x0, cfgs);

    const Word src = rig.mem.image().interleaved_base();
    ShotRecord shot;
    shot.reconfigure = true;
    shot.config_words = nwords;
    shot.in.assign(4, {});
    shot.out.assign(4, {});
    shot.in[0] = {src, 4, 4};
    shot.out[0] = {src + 0x100, 1, 4};

    try {
        rig.ctrl.run_shots({shot}, 0, /*max_cycles=*/100000, /*stall_window=*/64);
        FAIL("expected DeadlockError");
    } catch (const DeadlockError& e) {
        CHECK(e.dump.find("pe(3,0)") != std::string::npos);
        CHECK(e.dump.find("out0") != std::string::npos);
    }
}

TEST_CASE("timeout is raised at max_cycles") {
    Rig rig;
    PEConfig c = counter_pe(0);
    rig.fabric.configure(c); // free-running counter keeps firing forever
    ShotRecord shot;
    shot.in.assign(4, {});
    shot.out.assign(4, {});
    shot.out[0] = {rig.mem.image().interleaved_base(), 5, 4}; // never fed
    CHECK_THROWS_AS(rig.ctrl.run_shots({shot}, 0, /*max_cycles=*/500, 1 << 20),
                    TimeoutError);
}

TEST_CASE("snapshot: idle counters are zero; relaunch purity") {
    Rig rig;
    auto p = rig.ctrl.snapshot_counters();
    CHECK(p.total_cycles == 0);
    CHECK(p.exec_cycles == 0);
    CHECK(p.out_writes == 0);

    // two identical launches produce identical memory and counters deltas
    std::vector<PEConfig> col;
    for (int r = 0; r < 4; ++r) col.push_back(pass_ns(r * 4));
    Word nwords = place_config(rig.mem.image(), 0x0, col);
    const Word src = rig.mem.image().interleaved_base();
    for (Word i = 0; i < 6; ++i) rig.mem.image().store(src + 4 * i, 7 * i);

    ShotRecord shot;
    shot.reconfigure = true;
    shot.config_words = nwords;
    shot.in.assign(4, {});
    shot.out.assign(4, {});
    shot.in[0] = {src, 6, 4};
    shot.out[0] = {src + 0x200, 6, 4};

    auto r1 = rig.ctrl.run_shots({shot}, 10);
    uint64_t exec1 = r1.counters.exec_cycles;
    std::vector<Word> mem1(rig.mem.image().words());

    Rig rig2;
    for (Word i = 0; i < 6; ++i) rig2.mem.image().store(src + 4 * i, 7 * i);
    place_config(rig2.mem.image(), 0x0, col);
    auto r2 = rig2.ctrl.run_shots({shot}, 10);
    CHECK(r2.counters.exec_cycles == exec1);
    CHECK(rig2.mem.image().words() == mem1);
}
