#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ecgra/mapper.hpp"

namespace ecgra {

/// One phase of a benchmark: a manifest plus dimension overrides and a map
/// from the manifest's region names to the benchmark's physical regions.
struct PhaseSpec {
    std::string manifest;
    ExprEnv dims;
    std::map<std::string, std::string> aliases;
};

/// A benchmark: phases run in order against one shared memory image.
struct BenchmarkSpec {
    std::string id;
    ExprEnv dims; // benchmark-level dims (oracle + op counting)
    std::vector<RegionDecl> regions; // physical regions (words exprs use dims)
    std::vector<PhaseSpec> phases;
    std::string outputs; // final output element count, expression over dims
    uint64_t seed = 1;
    bool one_shot = false; // preamble excluded from performance metrics
};

/// The built-in eleven-kernel suite at the reference sizes.
std::vector<BenchmarkSpec> default_suite();

/// Deterministic pseudo-random words: x <- 1664525*x + 1013904223 (mod 2^32).
class Lcg {
  public:
    explicit Lcg(uint64_t seed) : state_(static_cast<Word>(seed ^ 0x9E3779B9u)) {}
    Word next() {
        state_ = state_ * 1664525u + 1013904223u;
        return state_;
    }

  private:
    Word state_;
};

/// Loaded, routed and laid-out benchmark phases sharing one memory map.
struct PreparedKernel {
    std::vector<KernelManifest> phases;
    std::vector<PlacedKernel> placed;
    std::vector<std::vector<Word>> images;
    std::vector<Word> image_addr;               // config blob base per phase
    std::vector<std::map<std::string, Word>> phase_regions; // manifest-name view
    std::map<std::string, Word> regions;        // physical regions
    std::vector<RegionDecl> region_decls;
    int64_t outputs = 0;
    ExprEnv dims;
};

PreparedKernel prepare_benchmark(const BenchmarkSpec& spec, const std::string& kernel_dir,
                                 int interleaved_banks);

/// Prepare a standalone manifest (the CLI path): its own regions, one phase.
PreparedKernel prepare_manifest(const KernelManifest& m, int interleaved_banks);

/// Fill init=rand regions with LCG words (declaration order) and install the
/// per-phase configuration blobs.
void gen_inputs(const PreparedKernel& k, MemoryImage& image, uint64_t seed);

/// Expected memory after the run, as (address, value) pairs.
using OracleResult = std::vector<std::pair<Word, Word>>;
OracleResult oracle_eval(const BenchmarkSpec& spec, const PreparedKernel& k,
                         const MemoryImage& input_image);

/// Arithmetic-operation count from the standard definition of each kernel
/// (matrix multiply 2n^3-n^2, butterfly ten ops per four inputs, ...).
int64_t count_ops(const std::string& id, const ExprEnv& dims);

/// Aggregate input-port initiation interval over the steady-state window
/// (middle half of all accepted input tokens) plus the two half-window
/// values used for the constancy check.
struct IIMeasure {
    double aggregate = 0;
    double first_half = 0;
    double second_half = 0;
    bool valid = false;
};
IIMeasure measure_input_ii(const PerfCounters& counters);

struct ReportRow {
    std::string kernel;
    std::string dims;
    bool one_shot = false;
    uint64_t config_cycles = 0;
    uint64_t exec_cycles = 0;
    uint64_t control_cycles = 0;
    uint64_t total_cycles = 0;
    int64_t operations = 0;
    int64_t outputs = 0;
    double outputs_per_cycle = 0;
    double mops_at_250mhz = 0;
    IIMeasure input_ii;
    uint64_t shots = 0;
    uint64_t max_interleaved_grants = 0;
    bool oracle_pass = false;
    std::string note;
};

struct Report {
    uint64_t seed = 1;
    int interleaved_banks = 4;
    int rows = 4;
    int cols = 4;
    uint64_t host_overhead = 0;
    std::string version;
    std::vector<ReportRow> rows_out;
};

/// Host-side synchronization cost per launch, one value for the whole
/// suite. Calibrated once against the multi-shot totals; see README.
constexpr uint64_t kHostOverheadCycles = 54;

struct BenchOptions {
    std::string kernel_dir = "kernels";
    int interleaved_banks = 4;
    uint64_t seed = 1;
    uint64_t host_overhead = kHostOverheadCycles;
    int grid_rows = 4;
    int grid_cols = 4;
    std::string trace_path; // non-empty: write a CSV trace of the run
};

/// Run one benchmark end to end; with hard_fail an OracleMismatch throws,
/// otherwise the row records pass=false.
ReportRow run_benchmark(const BenchmarkSpec& spec, const BenchOptions& opt,
                        bool hard_fail = false);

Report run_bench(const std::vector<BenchmarkSpec>& specs, const BenchOptions& opt,
                 bool hard_fail = false);

std::string report_to_json(const Report& report);
std::string report_to_table(const Report& report);

const char* tool_version();

} // namespace ecgra
