#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "ecgra/fabric.hpp"

using namespace ecgra;

namespace {

/// North-to-south pass-through PE for a given grid column.
PEConfig pass_ns(int pe_id) {
    PEConfig c;
    c.pe_id = static_cast<uint8_t>(pe_id);
    c.eb_gate_mask = 1u << GATE_IN_N;
    c.in_fork_mask[DIR_N] = 1u << (FORK_OUT_P1 + other_port_lane(DIR_N, DIR_S));
    c.out_mux_sel[DIR_S] = static_cast<OutMuxSel>(other_port_lane(DIR_S, DIR_N));
    return c;
}

BoundaryIO quiet_io(int cols) {
    BoundaryIO io;
    io.north_offers.resize(cols);
    io.south_readies.assign(cols, false);
    return io;
}

} // namespace

TEST_CASE("build_fabric: dimensions") {
    Fabric f(4, 4);
    CHECK(f.rows() == 4);
    CHECK(f.cols() == 4);
    CHECK(f.configured_count() == 0);
    CHECK(f.cycle() == 0);

    Fabric minimal(2, 1);
    CHECK(minimal.configured_count() == 0);

    CHECK_THROWS_AS(Fabric(1, 4), InvalidDimensions);
    CHECK_THROWS_AS(Fabric(0, 0), InvalidDimensions);
    CHECK_THROWS_AS(Fabric(16, 8), InvalidDimensions); // past the 6-bit id space
}

TEST_CASE("gated fabric: no offers, no demand, no activity") {
    Fabric f(4, 4);
    BoundaryIO io = quiet_io(4);
    io.north_offers[0] = {true, 42}; // nobody listens
    io.south_readies.assign(4, true);
    CyclePlan plan = f.settle(io);
    CHECK_FALSE(plan.any_fire);
    for (int c = 0; c < 4; ++c) CHECK_FALSE(plan.north_pops[c]);
    f.commit(plan, io);
    for (uint64_t a : f.perf().active_cycles) CHECK(a == 0);
}

TEST_CASE("pass-through chain: one firing per hop per cycle in steady state") {
    Fabric f(4, 1);
    for (int r = 0; r < 4; ++r) f.configure(pass_ns(r));
    f.check_wiring();

    std::vector<Word> fed;
    std::vector<Word> out;
    Word next = 1;
    for (int cyc = 0; cyc < 20; ++cyc) {
        BoundaryIO io = quiet_io(1);
        io.south_readies[0] = true;
        if (next <= 12) io.north_offers[0] = {true, next};
        CyclePlan plan = f.settle(io);
        f.commit(plan, io);
        if (plan.north_pops[0]) fed.push_back(next++);
        if (plan.south_pushes[0]) out.push_back(*plan.south_pushes[0]);
    }
    REQUIRE(fed.size() == 12);
    REQUIRE(out.size() == 12);
    CHECK(out == fed);
    // latency through four elastic buffers is four cycles, then steady 1/cycle
    CHECK(f.perf().fire_cycles[0] >= 12);
}

TEST_CASE("full back-pressure: buffers saturate at two tokens each and firings stop") {
    Fabric f(4, 1);
    for (int r = 0; r < 4; ++r) f.configure(pass_ns(r));

    int accepted = 0;
    int idle_cycles = 0;
    for (int cyc = 0; cyc < 30; ++cyc) {
        BoundaryIO io = quiet_io(1);
        io.south_readies[0] = false; // output node never ready
        io.north_offers[0] = {true, static_cast<Word>(cyc)};
        CyclePlan plan = f.settle(io);
        f.commit(plan, io);
        if (plan.north_pops[0]) accepted++;
        if (!plan.any_fire) idle_cycles++;
    }
    // four buffers of depth two fill completely, nothing more moves
    CHECK(accepted == 8);
    CHECK(idle_cycles >= 20);
    for (int r = 0; r < 4; ++r) CHECK(f.state(r).in_eb[DIR_N].size() == 2);
}

TEST_CASE("settle converges within the component bound") {
    Fabric f(4, 4);
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) {
            PEConfig cfg = pass_ns(r * 4 + c);
            f.configure(cfg);
        }
    BoundaryIO io = quiet_io(4);
    io.south_readies.assign(4, true);
    for (int c = 0; c < 4; ++c) io.north_offers[c] = {true, static_cast<Word>(c)};
    CyclePlan plan = f.settle(io);
    CHECK(plan.iterations <= 4 * 4 + 2);
    CHECK(plan.iterations >= 1);
}

TEST_CASE("solve_to_fixpoint: a never-settling network raises CombinationalLoop") {
    // Ready/valid ring with no elastic buffer: a = !b, b = a oscillates.
    bool a = false, b = false;
    auto step = [&]() {
        bool na = !b;
        bool nb = a;
        bool changed = (na != a) || (nb != b);
        a = na;
        b = nb;
        return changed;
    };
    CHECK_THROWS_AS(solve_to_fixpoint(18, step), CombinationalLoop);
}

TEST_CASE("check_wiring: driving an idle border or a gated buffer is rejected") {
    Fabric f(4, 1);
    // top PE routes north into the idle border
    PEConfig c;
    c.pe_id = 0;
    c.eb_gate_mask = 1u << GATE_IN_S;
    c.in_fork_mask[DIR_S] = 1u << (FORK_OUT_P1 + other_port_lane(DIR_S, DIR_N));
    c.out_mux_sel[DIR_N] = static_cast<OutMuxSel>(other_port_lane(DIR_N, DIR_S));
    f.configure(c);
    CHECK_THROWS_AS(f.check_wiring(), InvalidConfig);

    Fabric g(4, 1);
    g.configure(pass_ns(0)); // feeds pe 1, which is unconfigured
    CHECK_THROWS_AS(g.check_wiring(), InvalidConfig);

    Fabric ok(4, 1);
    for (int r = 0; r < 4; ++r) ok.configure(pass_ns(r));
    CHECK_NOTHROW(ok.check_wiring());
}

TEST_CASE("configure resets state; reconfiguration clears previous kernel") {
    Fabric f(2, 1);
    PEConfig c = pass_ns(0);
    f.configure(c);
    f.configure(pass_ns(1));

    BoundaryIO io = quiet_io(1);
    io.north_offers[0] = {true, 5};
    io.south_readies[0] = true;
    auto plan = f.settle(io);
    f.commit(plan, io);
    CHECK(f.state(0).in_eb[DIR_N].size() == 1);

    f.configure(c); // rewrite the same PE: its buffers reset
    CHECK(f.state(0).in_eb[DIR_N].size() == 0);

    f.clear_configs();
    CHECK(f.configured_count() == 0);
}

TEST_CASE("trace: deterministic event order") {
    std::vector<std::string> sites;
    Fabric f(2, 1);
    f.set_trace([&](const TraceEvent& e) { sites.push_back(e.kind + ":" + e.site); });
    f.configure(pass_ns(0));
    f.configure(pass_ns(1));
    BoundaryIO io = quiet_io(1);
    io.north_offers[0] = {true, 1};
    io.south_readies[0] = true;
    for (int cyc = 0; cyc < 3; ++cyc) {
        auto plan = f.settle(io);
        f.commit(plan, io);
    }
    REQUIRE(sites.size() >= 3);
    CHECK(sites[0] == "config:pe(0,0)");
    CHECK(sites[1] == "config:pe(1,0)");
}
