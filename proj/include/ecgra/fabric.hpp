#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ecgra/pe.hpp"

namespace ecgra {

struct TraceEvent {
    uint64_t cycle = 0;
    std::string site;
    std::string kind; // fire, stall, config, warning
    Word value = 0;
};

using TraceSink = std::function<void(const TraceEvent&)>;

struct FabricPerf {
    std::vector<uint64_t> active_cycles; // per PE: configured while matrix clock on
    std::vector<uint64_t> fire_cycles;   // per PE: cycles with at least one firing
    uint64_t merge_collisions = 0;
};

/// Whole-cycle firing plan: one PEPlan per configured PE plus the boundary
/// transfers against the stream nodes.
struct CyclePlan {
    std::vector<std::optional<PEPlan>> pe;     // row-major, nullopt = gated PE
    std::vector<bool> north_pops;              // per column: input node head consumed
    std::vector<std::optional<Word>> south_pushes; // per column: token to output node
    bool any_fire = false;
    int iterations = 0;
};

/// Boundary view the fabric sees each cycle: input-node offers on the north
/// border, output-node readiness on the south border.
struct BoundaryIO {
    std::vector<ChannelOffer> north_offers;
    std::vector<bool> south_readies;
};

/// The elastic PE mesh and its two-phase cycle engine. PE(r,c) connects to
/// its four nearest neighbors; row 0 north ports bind to input nodes, last
/// row south ports to output nodes, all other border ports idle.
class Fabric {
  public:
    Fabric(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    uint64_t cycle() const { return cycle_; }

    void set_trace(TraceSink sink) { trace_ = std::move(sink); }

    /// Apply one PE configuration (resets that PE's state and enables its
    /// clock). pe_id indexes row-major.
    void configure(const PEConfig& cfg);
    /// Drop all configurations (full reconfiguration between kernels).
    void clear_configs();
    /// Reset dynamic state of configured PEs, keeping configurations.
    void reset_state();

    bool configured(int pe_id) const { return configs_[pe_id].has_value(); }
    const PEConfig& config(int pe_id) const { return configs_[pe_id].value(); }
    const PEState& state(int pe_id) const { return states_[pe_id]; }
    int configured_count() const;

    /// Cross-PE wiring liveness: every active out port must face a live
    /// consumer. Throws InvalidConfig.
    void check_wiring() const;

    /// Solve all fork/join handshake equations for this cycle by monotone
    /// fixpoint iteration over cycle-start state. Throws CombinationalLoop
    /// if the component bound is exceeded.
    CyclePlan settle(const BoundaryIO& io) const;

    /// Advance one cycle with the plan produced by settle this cycle.
    void commit(const CyclePlan& plan, const BoundaryIO& io);

    FabricPerf& perf() { return perf_; }
    const FabricPerf& perf() const { return perf_; }

    /// Human-readable occupancy dump for deadlock reports.
    std::string dump_state() const;

  private:
    int index(int r, int c) const { return r * cols_ + c; }
    bool in_eb_ready(int r, int c, int dir) const;

    int rows_;
    int cols_;
    uint64_t cycle_ = 0;
    std::vector<std::optional<PEConfig>> configs_;
    std::vector<PEState> states_;
    FabricPerf perf_;
    TraceSink trace_;
};

/// Direction reversal across a mesh edge (N<->S, E<->W).
inline int flip_dir(int d) { return d ^ 2; }

/// Iterate `step` (which re-evaluates a signal network and reports whether
/// anything changed) until it stabilizes. Throws CombinationalLoop after
/// `bound` passes: a handshake network whose equations never settle has a
/// combinational cycle that no elastic buffer breaks.
void solve_to_fixpoint(int bound, const std::function<bool()>& step);

} // namespace ecgra
