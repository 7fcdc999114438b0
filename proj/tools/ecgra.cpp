// Command-line front end: validate / asm / sim / bench.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "ecgra/bench.hpp"

using namespace ecgra;

namespace {

ExprEnv parse_dims(const std::vector<std::string>& kvs) {
    ExprEnv env;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ParseError("--dims expects name=value, got '" + kv + "'");
        env[kv.substr(0, eq)] = std::stoll(kv.substr(eq + 1));
    }
    return env;
}

int cmd_validate(const std::string& path, const ExprEnv& dims) {
    KernelManifest m = load_manifest_file(path, dims);
    auto diags = validate_dfg(m.dfg);
    auto pd = validate_placement(m);
    diags.insert(diags.end(), pd.begin(), pd.end());
    for (const auto& d : diags) std::cout << "diagnostic: " << d << "\n";
    if (!diags.empty()) return 1;
    PlacedKernel k = route_kernel(m);
    std::cout << m.name << ": legal, " << k.configs.size() << " PEs, "
              << emit_image(k).size() << " config words\n";
    for (const auto& [edge, hops] : k.edge_routes) {
        std::cout << "  " << edge << ":";
        for (const auto& h : hops)
            std::cout << " pe(" << h.pe / m.cols << "," << h.pe % m.cols << ")."
                      << dir_name(h.in_port);
        std::cout << "\n";
    }
    return 0;
}

int cmd_asm(const std::string& path, const std::string& out, bool hex, const ExprEnv& dims) {
    KernelManifest m = load_manifest_file(path, dims);
    PlacedKernel k = route_kernel(m);
    std::vector<Word> words = emit_image(k);
    std::ofstream f(out, hex ? std::ios::out : std::ios::binary);
    if (!f) throw Error("cannot write " + out);
    if (hex) {
        f << std::hex << std::setfill('0');
        for (Word w : words) f << std::setw(8) << w << "\n";
    } else {
        for (Word w : words) {
            const uint8_t b[4] = {static_cast<uint8_t>(w), static_cast<uint8_t>(w >> 8),
                                  static_cast<uint8_t>(w >> 16),
                                  static_cast<uint8_t>(w >> 24)};
            f.write(reinterpret_cast<const char*>(b), 4);
        }
    }
    std::cout << words.size() << " words (" << k.configs.size() << " PEs) -> " << out << "\n";
    return 0;
}

int cmd_sim(const std::string& path, const std::string& mem_in, const std::string& mem_out,
            const std::string& trace, uint64_t max_cycles, int rows, int cols, int banks,
            uint64_t seed, uint64_t host_overhead, const ExprEnv& dims) {
    KernelManifest m = load_manifest_file(path, dims);
    PreparedKernel prep = prepare_manifest(m, banks);

    Fabric fabric(rows, cols);
    MemorySystem mem(banks, cols);
    Controller ctrl(fabric, mem);

    if (!mem_in.empty()) {
        mem.image().load_file(mem_in);
        for (size_t i = 0; i < prep.images[0].size(); ++i)
            mem.image().store(prep.image_addr[0] + 4 * static_cast<Word>(i),
                              prep.images[0][i]);
    } else {
        gen_inputs(prep, mem.image(), seed);
    }

    std::ofstream trace_file;
    if (!trace.empty()) {
        trace_file.open(trace);
        trace_file << "cycle,site,kind,value\n";
        fabric.set_trace([&](const TraceEvent& e) {
            trace_file << e.cycle << "," << e.site << "," << e.kind << "," << e.value << "\n";
        });
    }

    auto shots = expand_shots(prep.phases[0], prep.placed[0], prep.phase_regions[0],
                              prep.image_addr[0], static_cast<Word>(prep.images[0].size()));
    try {
        ctrl.run_shots(shots, host_overhead, max_cycles);
    } catch (const DeadlockError& e) {
        std::cerr << "deadlock: " << e.what() << "\n" << e.dump;
        if (!mem_out.empty()) mem.image().save_file(mem_out);
        return 2;
    } catch (const TimeoutError& e) {
        std::cerr << "timeout: " << e.what() << "\n";
        return 2;
    }

    if (!mem_out.empty()) mem.image().save_file(mem_out);
    const PerfCounters p = ctrl.snapshot_counters();
    std::cout << "kernel " << m.name << "\n"
              << "shots " << p.shots << "\n"
              << "configuration_cycles " << p.config_cycles << "\n"
              << "execution_cycles " << p.exec_cycles << "\n"
              << "control_cycles " << p.control_cycles << "\n"
              << "total_cycles " << p.total_cycles << "\n"
              << "output_writes " << p.out_writes << "\n";
    IIMeasure ii = measure_input_ii(p);
    if (ii.valid) std::cout << "input_ii " << ii.aggregate << "\n";
    return 0;
}

int cmd_bench(const std::string& filter, const std::string& out_path,
              const BenchOptions& opt) {
    std::vector<BenchmarkSpec> specs;
    for (auto& s : default_suite()) {
        if (filter.empty()) {
            specs.push_back(std::move(s));
            continue;
        }
        std::stringstream ss(filter);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (tok == s.id) specs.push_back(s);
    }
    if (specs.empty()) {
        std::cerr << "no kernels match filter '" << filter << "'\n";
        return 1;
    }
    Report report = run_bench(specs, opt);
    std::cout << report_to_table(report);
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        f << report_to_json(report);
        std::cout << "report -> " << out_path << "\n";
    }
    for (const auto& r : report.rows_out)
        if (!r.oracle_pass) {
            std::cerr << r.kernel << ": oracle mismatch: " << r.note << "\n";
            return 2;
        }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cycle-accurate elastic CGRA simulator and offload toolchain"};
    app.require_subcommand(1);

    std::vector<std::string> dim_args;
    std::string manifest, out_path, mem_in, mem_out, trace_path, filter, kernel_dir;
    const char* env_dir = std::getenv("ECGRA_KERNEL_DIR");
    kernel_dir = env_dir ? env_dir : "kernels";
    bool hex = false;
    uint64_t max_cycles = 50'000'000;
    uint64_t seed = 1;
    uint64_t host_overhead = kHostOverheadCycles;
    int banks = 4;
    std::string grid = "4x4";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--dims", dim_args, "dimension overrides, name=value");
    };

    auto* validate = app.add_subcommand("validate", "check a kernel manifest");
    validate->add_option("manifest", manifest)->required();
    add_common(validate);

    auto* asmc = app.add_subcommand("asm", "assemble a configuration image");
    asmc->add_option("manifest", manifest)->required();
    asmc->add_option("-o,--out", out_path, "output image file")->required();
    asmc->add_flag("--hex", hex, "one hex word per line instead of binary");
    add_common(asmc);

    auto* sim = app.add_subcommand("sim", "run a kernel manifest");
    sim->add_option("manifest", manifest)->required();
    sim->add_option("--mem-in", mem_in, "input memory image (default: generated)");
    sim->add_option("--mem-out", mem_out, "write final memory image");
    sim->add_option("--trace", trace_path, "write a CSV event trace");
    sim->add_option("--max-cycles", max_cycles);
    sim->add_option("--grid", grid, "fabric dimensions RxC");
    sim->add_option("--banks", banks, "interleaved bank count (2, 4 or 8)");
    sim->add_option("--seed", seed);
    sim->add_option("--host-overhead", host_overhead);
    add_common(sim);

    auto* bench = app.add_subcommand("bench", "run the benchmark suite");
    bench->add_option("filter", filter, "comma-separated kernel ids (default: all)");
    bench->add_option("-o,--out", out_path, "write the JSON report");
    bench->add_option("--kernels", kernel_dir, "manifest directory");
    bench->add_option("--banks", banks);
    bench->add_option("--seed", seed);
    bench->add_option("--host-overhead", host_overhead);
    bench->add_option("--trace", trace_path, "write a CSV event trace");

    CLI11_PARSE(app, argc, argv);

    try {
        const ExprEnv dims = parse_dims(dim_args);
        if (validate->parsed()) return cmd_validate(manifest, dims);
        if (asmc->parsed()) return cmd_asm(manifest, out_path, hex, dims);
        if (sim->parsed()) {
            const auto x = grid.find('x');
            if (x == std::string::npos) throw ParseError("--grid expects RxC");
            return cmd_sim(manifest, mem_in, mem_out, trace_path, max_cycles,
                           std::stoi(grid.substr(0, x)), std::stoi(grid.substr(x + 1)),
                           banks, seed, host_overhead, dims);
        }
        if (bench->parsed()) {
            BenchOptions opt;
            opt.kernel_dir = kernel_dir;
            opt.interleaved_banks = banks;
            opt.seed = seed;
            opt.host_overhead = host_overhead;
            opt.trace_path = trace_path;
            return cmd_bench(filter, out_path, opt);
        }
    } catch (const DeadlockError& e) {
        std::cerr << "error: " << e.what() << "\n" << e.dump;
        return 2;
    } catch (const OracleMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
