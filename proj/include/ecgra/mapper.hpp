#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecgra/controller.hpp"
#include "ecgra/dfg.hpp"
#include "ecgra/expr.hpp"
#include "ecgra/memory.hpp"

namespace ecgra {

/// Named slice of the memory image. space selects the allocator: one of the
/// contiguous banks ("bank0".."bank3") or the interleaved region
/// ("interleaved"). phase pins the base word modulo the interleaved bank
/// count, which controls which bank a unit-stride stream starts on.
struct RegionDecl {
    std::string name;
    std::string words; // expression in the manifest dims
    std::string init = "zero"; // zero | rand
    Word mask = 0xFFFFFFFFu;   // applied to generated words
    std::string space = "interleaved";
    int phase = -1; // -1 = don't care
};

struct ShotStream {
    std::string base;   // expressions over dims, loop vars and region bases
    std::string size;
    std::string stride = "4";
};

/// A loop nest of launches. Loop variables expand row-major, outermost
/// first. reconfigure: "first" (only the first launch of the whole schedule
/// carries configuration), "always", or "never".
struct ShotDecl {
    std::vector<std::pair<std::string, std::string>> loops; // (var, bound expr)
    std::string reconfigure = "first";
    std::map<std::string, ShotStream> streams; // stream node -> descriptor exprs
};

struct KernelManifest {
    std::string name;
    int rows = 4;
    int cols = 4;
    ExprEnv dims;
    std::vector<RegionDecl> regions;
    DFG dfg; // post-unroll
    std::map<std::string, std::pair<int, int>> placement; // compute node -> (row, col)
    std::map<std::string, int> input_columns;             // input node -> column
    std::map<std::string, int> output_columns;            // output node -> column
    /// Routing waypoints per edge key "src->dst.port" (src may be "src:t").
    std::map<std::string, std::vector<std::pair<int, int>>> vias;
    std::vector<ShotDecl> shots;
    /// Declared number of final result elements (expression), for
    /// outputs-per-cycle reporting.
    std::string outputs_expr;
};

KernelManifest parse_manifest(const std::string& text,
                              const ExprEnv& dim_overrides = {});
KernelManifest load_manifest_file(const std::string& path,
                                  const ExprEnv& dim_overrides = {});

/// Placement/border diagnostics per the mapping rules; empty = legal.
std::vector<std::string> validate_placement(const KernelManifest& m);

/// One hop of a routed signal: entering `pe` through `in_port` and leaving
/// through `out_port` (-1 at endpoints).
struct RouteHop {
    int pe = -1;
    int in_port = -1;
    int out_port = -1;
};

/// The routed and assembled kernel: per-PE configurations (row-major order,
/// which is also the image emission order) plus routing diagnostics.
struct PlacedKernel {
    std::vector<PEConfig> configs;
    std::map<std::string, std::vector<RouteHop>> edge_routes;
    std::map<std::string, int> input_columns;
    std::map<std::string, int> output_columns;
};

/// Capacity-constrained breadth-first routing of every DFG edge over the
/// port graph, deterministic tie-break (N,E,S,W, then lower PE index).
/// Throws Unroutable naming the first edge that does not fit.
PlacedKernel route_kernel(const KernelManifest& m);

/// Five little-endian words per used PE, row-major.
std::vector<Word> emit_image(const PlacedKernel& k);

/// Region layout: allocate every declared region, returning name -> byte
/// base. The configuration blobs occupy bank0 starting at address 0.
std::map<std::string, Word> layout_regions(const std::vector<RegionDecl>& decls,
                                           const ExprEnv& dims, Word config_bytes,
                                           int interleaved_banks);

inline std::map<std::string, Word> layout_regions(const KernelManifest& m,
                                                  Word config_bytes,
                                                  int interleaved_banks) {
    return layout_regions(m.regions, m.dims, config_bytes, interleaved_banks);
}

/// Fully expanded launch schedule. Loop variables are bound from the
/// manifest dims; region bases come from the layout.
std::vector<ShotRecord> expand_shots(const KernelManifest& m, const PlacedKernel& k,
                                     const std::map<std::string, Word>& region_base,
                                     Word config_addr, Word config_words);

} // namespace ecgra
