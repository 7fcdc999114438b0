#pragma once

#include <array>
#include <vector>

#include "ecgra/fabric.hpp"
#include "ecgra/memory.hpp"

namespace ecgra {

/// Measurement surface of a run. total = config + exec + control, exactly.
struct PerfCounters {
    uint64_t total_cycles = 0;
    uint64_t config_cycles = 0;
    uint64_t exec_cycles = 0;
    uint64_t control_cycles = 0;
    std::vector<uint64_t> pe_active_cycles;
    std::vector<uint64_t> pe_fire_cycles;
    std::array<uint64_t, MemoryImage::kBanks> bank_conflict_cycles{};
    std::array<uint64_t, 8> node_transfers{};
    uint64_t out_writes = 0;
    uint64_t merge_collisions = 0;
    uint64_t max_interleaved_grants = 0;
    uint64_t shots = 0;
    /// Exec-cycle stamps of every accepted token per input column, for
    /// initiation-interval measurement.
    std::vector<std::vector<uint64_t>> input_fire_cycles;
};

/// Clock/power gate bookkeeping. Per-PE enables live in the fabric
/// (configured <=> clock on); per-buffer enables in each PEConfig mask.
struct GateState {
    bool accelerator_power = true;
    bool accelerator_clock = true;
    bool matrix_clock = false; // enabled only while a kernel executes
};

/// One kernel launch as the host performs it: optional reconfiguration plus
/// descriptors for every stream node (unused nodes get size 0).
struct ShotRecord {
    bool reconfigure = false;
    Word config_addr = 0;
    Word config_words = 0;
    std::vector<StreamDescriptor> in;
    std::vector<StreamDescriptor> out;
};

struct RunResult {
    PerfCounters counters;
};

/// Register map, word offsets (see README): 0x00 status, 0x04 command,
/// 0x08 config_addr, 0x0C config_words, 0x10+i*0x10 IN_i {base,size,stride},
/// 0x50+j*0x10 OUT_j likewise, 0x90.. read-only counter window.
class Controller {
  public:
    static constexpr Word kRegStatus = 0x00;
    static constexpr Word kRegCommand = 0x04;
    static constexpr Word kRegConfigAddr = 0x08;
    static constexpr Word kRegConfigWords = 0x0C;
    static constexpr Word kRegInBase = 0x10;
    static constexpr Word kRegOutBase = 0x50;
    static constexpr Word kRegCounters = 0x90;

    static constexpr Word kCmdStart = 1;
    static constexpr Word kCmdReconfigureAndStart = 2;
    static constexpr Word kCmdAbort = 3;

    Controller(Fabric& fabric, MemorySystem& mem);

    Word reg_read(Word addr) const;
    /// Throws BusyWrite while a kernel runs (abort excepted).
    void reg_write(Word addr, Word value);

    bool busy() const { return busy_; }
    bool done() const { return done_; }
    const GateState& gates() const { return gates_; }

    /// Stream the configuration words through the first input node and apply
    /// them. Returns cycles used (= words + fixed control overhead of 4).
    uint64_t fetch_configuration();

    /// Run the started kernel to completion (all active output nodes done).
    /// Raises Deadlock/Timeout. Counts into exec_cycles.
    void run_active(uint64_t max_cycles, int stall_window);

    /// Full host sequence for a list of shots: descriptor writes (1 cycle
    /// each), optional reconfiguration, start, execution, plus
    /// host_overhead control cycles per shot for CPU-side synchronization.
    RunResult run_shots(const std::vector<ShotRecord>& shots, uint64_t host_overhead,
                        uint64_t max_cycles = 10'000'000, int stall_window = 64);

    PerfCounters snapshot_counters() const;
    void reset_counters();

  private:
    void start(bool reconfigure);

    Fabric& fabric_;
    MemorySystem& mem_;
    GateState gates_;
    bool busy_ = false;
    bool done_ = false;
    Word config_addr_ = 0;
    Word config_words_ = 0;
    std::vector<StreamDescriptor> in_desc_;
    std::vector<StreamDescriptor> out_desc_;
    PerfCounters perf_;
};

} // namespace ecgra
