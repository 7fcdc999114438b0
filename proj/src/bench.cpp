#include "ecgra/bench.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ecgra {

const char* tool_version() { return "ecgra 1.0.0"; }

PreparedKernel prepare_benchmark(const BenchmarkSpec& spec, const std::string& kernel_dir,
                                 int interleaved_banks) {
    PreparedKernel k;
    k.dims = spec.dims;
    Word blob_cursor = 0;
    for (const auto& phase : spec.phases) {
        ExprEnv dims = spec.dims;
        for (const auto& [key, v] : phase.dims) dims[key] = v;
        KernelManifest m = load_manifest_file(kernel_dir + "/" + phase.manifest, dims);
        PlacedKernel placed = route_kernel(m);
        std::vector<Word> image = emit_image(placed);
        k.image_addr.push_back(blob_cursor);
        blob_cursor += static_cast<Word>(image.size()) * 4;
        blob_cursor = (blob_cursor + 63) & ~63u;
        k.phases.push_back(std::move(m));
        k.placed.push_back(std::move(placed));
        k.images.push_back(std::move(image));
    }
    k.region_decls = spec.regions;
    k.regions = layout_regions(k.region_decls, spec.dims, blob_cursor, interleaved_banks);
    for (size_t p = 0; p < k.phases.size(); ++p) {
        const auto& aliases = spec.phases[p].aliases;
        std::map<std::string, Word> view;
        for (const auto& decl : k.phases[p].regions) {
            auto alias = aliases.find(decl.name);
            const std::string physical = alias == aliases.end() ? decl.name : alias->second;
            auto it = k.regions.find(physical);
            if (it == k.regions.end())
                throw ParseError(spec.id + ": phase region '" + decl.name +
                                 "' has no physical region '" + physical + "'");
            view[decl.name] = it->second;
        }
        k.phase_regions.push_back(std::move(view));
    }
    k.outputs = eval_expr(spec.outputs, spec.dims);
    return k;
}

PreparedKernel prepare_manifest(const KernelManifest& m, int interleaved_banks) {
    PreparedKernel k;
    k.dims = m.dims;
    k.placed.push_back(route_kernel(m));
    k.images.push_back(emit_image(k.placed[0]));
    k.image_addr.push_back(0);
    k.phases.push_back(m);
    k.region_decls = m.regions;
    k.regions = layout_regions(m.regions, m.dims,
                               static_cast<Word>(k.images[0].size()) * 4, interleaved_banks);
    k.phase_regions.push_back(k.regions);
    k.outputs = eval_expr(m.outputs_expr, m.dims);
    return k;
}

void gen_inputs(const PreparedKernel& k, MemoryImage& image, uint64_t seed) {
    for (Word& w : image.words()) w = 0;
    for (size_t p = 0; p < k.images.size(); ++p)
        for (size_t i = 0; i < k.images[p].size(); ++i)
            image.store(k.image_addr[p] + 4 * static_cast<Word>(i), k.images[p][i]);
    Lcg lcg(seed);
    for (const auto& decl : k.region_decls) {
        const int64_t words = eval_expr(decl.words, k.dims);
        if (decl.init != "rand") continue;
        const Word base = k.regions.at(decl.name);
        for (int64_t i = 0; i < words; ++i)
            image.store(base + 4 * static_cast<Word>(i), lcg.next() & decl.mask);
    }
}

namespace {

std::vector<Word> read_region(const MemoryImage& img, Word base, int64_t n) {
    std::vector<Word> v(n);
    for (int64_t i = 0; i < n; ++i) v[i] = img.load(base + 4 * static_cast<Word>(i));
    return v;
}

void append_region(OracleResult& out, Word base, const std::vector<Word>& values) {
    for (size_t i = 0; i < values.size(); ++i)
        out.emplace_back(base + 4 * static_cast<Word>(i), values[i]);
}

std::vector<Word> matmul(const std::vector<Word>& a, const std::vector<Word>& b, int64_t m,
                         int64_t n, int64_t kd) {
    std::vector<Word> c(m * n, 0);
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) {
            Word acc = 0;
            for (int64_t x = 0; x < kd; ++x) acc += a[i * kd + x] * b[x * n + j];
            c[i * n + j] = acc;
        }
    return c;
}

} // namespace

OracleResult oracle_eval(const BenchmarkSpec& spec, const PreparedKernel& k,
                         const MemoryImage& img) {
    OracleResult out;
    const ExprEnv& d = spec.dims;
    auto dim = [&](const char* name) { return d.at(name); };
    auto reg = [&](const char* name) { return k.regions.at(name); };

    if (spec.id == "fft") {
        const int64_t n = dim("n");
        auto ar = read_region(img, reg("ar"), n), ai = read_region(img, reg("ai"), n);
        auto br = read_region(img, reg("br"), n), bi = read_region(img, reg("bi"), n);
        const Word wr = 3, wi = 4; // twiddle constants, mirrored in fft.json
        std::vector<Word> Ar(n), Ai(n), Br(n), Bi(n);
        for (int64_t i = 0; i < n; ++i) {
            const Word tr = wr * br[i] - wi * bi[i];
            const Word ti = wr * bi[i] + wi * br[i];
            Ar[i] = ar[i] + tr;
            Br[i] = ar[i] - tr;
            Ai[i] = ai[i] + ti;
            Bi[i] = ai[i] - ti;
        }
        append_region(out, reg("Ar"), Ar);
        append_region(out, reg("Br"), Br);
        append_region(out, reg("Ai"), Ai);
        append_region(out, reg("Bi"), Bi);
        return out;
    }
    if (spec.id == "relu") {
        const int64_t n = dim("n");
        for (int c = 0; c < 3; ++c) {
            const std::string xs = "x" + std::to_string(c), ys = "y" + std::to_string(c);
            auto x = read_region(img, k.regions.at(xs), n);
            std::vector<Word> y(n);
            for (int64_t i = 0; i < n; ++i) y[i] = as_signed(x[i]) > 0 ? x[i] : 0;
            append_region(out, k.regions.at(ys), y);
        }
        return out;
    }
    if (spec.id == "dither") {
        const int64_t n = dim("n");
        for (int c = 0; c < 2; ++c) {
            auto p = read_region(img, k.regions.at("p" + std::to_string(c)), n);
            std::vector<Word> o(n);
            Word err = 0;
            for (int64_t i = 0; i < n; ++i) {
                const Word v = p[i] + err;
                o[i] = as_signed(v) > 127 ? 255 : 0;
                err = v - o[i];
            }
            append_region(out, k.regions.at("o" + std::to_string(c)), o);
        }
        return out;
    }
    if (spec.id == "find2min") {
        const int64_t n = dim("n");
        auto x = read_region(img, reg("x"), n);
        Word m1 = 0x7FFFFFFF, m2 = 0x7FFFFFFF;
        for (int64_t i = 0; i < n; ++i) {
            const Word p = (x[i] << 10) + static_cast<Word>(i);
            Word hi = p;
            if (as_signed(m1) > as_signed(p)) { // strictly-smaller packed order
                hi = m1;
                m1 = p;
            }
            if (as_signed(m2) > as_signed(hi)) m2 = hi;
        }
        out.emplace_back(reg("r1"), m1);
        out.emplace_back(reg("r2"), m2);
        return out;
    }
    if (spec.id == "mm16" || spec.id == "mm64") {
        const int64_t n = dim("n");
        auto a = read_region(img, reg("A"), n * n);
        auto b = read_region(img, reg("B"), n * n);
        append_region(out, reg("C"), matmul(a, b, n, n, n));
        return out;
    }
    if (spec.id == "conv2d") {
        const int64_t w = dim("w"), h = dim("h");
        auto image = read_region(img, reg("img"), w * h);
        // separable smoothing filter: every row is (1, 2, 1)
        std::vector<Word> expect;
        std::vector<Word> addr_base;
        const Word pa = reg("Pa");
        for (int64_t y = 0; y + 2 < h; ++y) {
            for (int64_t x = 0; x + 2 < w; ++x) {
                Word acc = 0;
                for (int64_t r = 0; r < 3; ++r)
                    acc += image[(y + r) * w + x] + 2 * image[(y + r) * w + x + 1] +
                           image[(y + r) * w + x + 2];
                out.emplace_back(pa + 4 * static_cast<Word>(y * w + x), acc);
            }
        }
        return out;
    }
    if (spec.id == "gemm") {
        const int64_t ni = dim("ni"), nj = dim("nj"), nk = dim("nk");
        const Word alpha = static_cast<Word>(dim("alpha")), beta = static_cast<Word>(dim("beta"));
        auto a = read_region(img, reg("gA"), ni * nk);
        auto b = read_region(img, reg("gB"), nk * nj);
        auto c = read_region(img, reg("gC"), ni * nj);
        auto t = matmul(a, b, ni, nj, nk);
        std::vector<Word> r(ni * nj);
        for (int64_t i = 0; i < ni * nj; ++i) r[i] = alpha * t[i] + beta * c[i];
        append_region(out, reg("gC"), r);
        return out;
    }
    if (spec.id == "gesummv") {
        const int64_t n = dim("n");
        const Word alpha = static_cast<Word>(dim("alpha")), beta = static_cast<Word>(dim("beta"));
        auto a = read_region(img, reg("sA"), n * n);
        auto b = read_region(img, reg("sB"), n * n);
        auto x = read_region(img, reg("sx"), n);
        std::vector<Word> y(n);
        for (int64_t i = 0; i < n; ++i) {
            Word da = 0, db = 0;
            for (int64_t j = 0; j < n; ++j) {
                da += a[i * n + j] * x[j];
                db += b[i * n + j] * x[j];
            }
            y[i] = alpha * da + beta * db;
        }
        append_region(out, reg("sy"), y);
        return out;
    }
    if (spec.id == "gemver") {
        const int64_t n = dim("n");
        const Word alpha = static_cast<Word>(dim("alpha")), beta = static_cast<Word>(dim("beta"));
        auto a = read_region(img, reg("vA"), n * n);
        auto u1 = read_region(img, reg("vu1"), n), v1 = read_region(img, reg("vv1"), n);
        auto u2 = read_region(img, reg("vu2"), n), v2 = read_region(img, reg("vv2"), n);
        auto x = read_region(img, reg("vx"), n), y = read_region(img, reg("vy"), n);
        auto z = read_region(img, reg("vz"), n);
        std::vector<Word> ah(n * n);
        for (int64_t i = 0; i < n; ++i)
            for (int64_t j = 0; j < n; ++j)
                ah[i * n + j] = (a[i * n + j] + u1[i] * v1[j]) + u2[i] * v2[j];
        std::vector<Word> xo(n);
        for (int64_t j = 0; j < n; ++j) {
            Word t = 0;
            for (int64_t i = 0; i < n; ++i) t += ah[i * n + j] * y[i];
            xo[j] = x[j] + beta * t + z[j];
        }
        std::vector<Word> w(n);
        for (int64_t i = 0; i < n; ++i) {
            Word t = 0;
            for (int64_t j = 0; j < n; ++j) t += ah[i * n + j] * xo[j];
            w[i] = alpha * t;
        }
        append_region(out, reg("vAh"), ah);
        append_region(out, reg("vx"), xo);
        append_region(out, reg("vw"), w);
        return out;
    }
    if (spec.id == "2mm") {
        const int64_t ni = dim("ni"), nj = dim("nj"), nk = dim("nk"), nl = dim("nl");
        const Word alpha = static_cast<Word>(dim("alpha")), beta = static_cast<Word>(dim("beta"));
        auto a = read_region(img, reg("mA"), ni * nk);
        auto b = read_region(img, reg("mB"), nk * nj);
        auto c = read_region(img, reg("mC"), nj * nl);
        auto dmat = read_region(img, reg("mD"), ni * nl);
        auto t = matmul(a, b, ni, nj, nk);
        for (auto& v : t) v *= alpha;
        auto s = matmul(t, c, ni, nl, nj);
        std::vector<Word> r(ni * nl);
        for (int64_t i = 0; i < ni * nl; ++i) r[i] = s[i] + beta * dmat[i];
        append_region(out, reg("mD"), r);
        return out;
    }
    if (spec.id == "3mm") {
        const int64_t ni = dim("ni"), nj = dim("nj"), nk = dim("nk"), nl = dim("nl"),
                      nm = dim("nm");
        auto a = read_region(img, reg("tA"), ni * nk);
        auto b = read_region(img, reg("tB"), nk * nj);
        auto c = read_region(img, reg("tC"), nj * nm);
        auto dmat = read_region(img, reg("tD"), nm * nl);
        auto e = matmul(a, b, ni, nj, nk);
        auto f = matmul(c, dmat, nj, nl, nm);
        auto g = matmul(e, f, ni, nl, nj);
        append_region(out, reg("tG"), g);
        return out;
    }
    throw Error("no oracle for kernel '" + spec.id + "'");
}

int64_t count_ops(const std::string& id, const ExprEnv& dims) {
    auto dim = [&](const char* name) { return dims.at(name); };
    if (id == "fft") return 10 * dim("n"); // ten arithmetic ops per four inputs
    if (id == "relu") return 2 * 3 * dim("n");
    if (id == "dither") return 6 * 2 * dim("n");
    if (id == "find2min") return 11 * dim("n");
    if (id == "mm16" || id == "mm64" || id == "mm") {
        const int64_t n = dim("n");
        return 2 * n * n * n - n * n;
    }
    if (id == "conv2d") {
        const int64_t w = dim("w") - 2, h = dim("h") - 2;
        return 17 * w * h; // 9 multiplies + 8 adds per 3x3 window
    }
    if (id == "gemm")
        return 2 * dim("ni") * dim("nj") * dim("nk") + 3 * dim("ni") * dim("nj");
    if (id == "gemver") {
        const int64_t n = dim("n");
        return 8 * n * n + 4 * n;
    }
    if (id == "gesummv") {
        const int64_t n = dim("n");
        return 4 * n * n + 3 * n;
    }
    if (id == "2mm")
        return 2 * dim("ni") * dim("nj") * dim("nk") + 2 * dim("ni") * dim("nl") * dim("nj") +
               dim("ni") * dim("nj") + 2 * dim("ni") * dim("nl");
    if (id == "3mm")
        return 2 * (dim("ni") * dim("nj") * dim("nk") + dim("nj") * dim("nl") * dim("nm") +
                    dim("ni") * dim("nl") * dim("nj"));
    throw Error("no operation count for kernel '" + id + "'");
}

IIMeasure measure_input_ii(const PerfCounters& counters) {
    std::vector<uint64_t> stamps;
    for (const auto& col : counters.input_fire_cycles)
        stamps.insert(stamps.end(), col.begin(), col.end());
    std::sort(stamps.begin(), stamps.end());
    IIMeasure m;
    if (stamps.size() < 16) return m;
    const size_t lo = stamps.size() / 4;
    const size_t hi = (3 * stamps.size()) / 4;
    const size_t mid = (lo + hi) / 2;
    auto rate = [&](size_t a, size_t b) {
        return static_cast<double>(stamps[b] - stamps[a]) / static_cast<double>(b - a);
    };
    m.aggregate = rate(lo, hi - 1);
    m.first_half = rate(lo, mid);
    m.second_half = rate(mid, hi - 1);
    m.valid = true;
    return m;
}

namespace {

std::string dims_to_string(const ExprEnv& dims) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : dims) {
        if (!first) os << " ";
        first = false;
        os << k << "=" << v;
    }
    return os.str();
}

} // namespace

ReportRow run_benchmark(const BenchmarkSpec& spec, const BenchOptions& opt, bool hard_fail) {
    PreparedKernel prep = prepare_benchmark(spec, opt.kernel_dir, opt.interleaved_banks);

    Fabric fabric(opt.grid_rows, opt.grid_cols);
    MemorySystem mem(opt.interleaved_banks, opt.grid_cols);
    Controller ctrl(fabric, mem);

    std::ofstream trace_file;
    if (!opt.trace_path.empty()) {
        trace_file.open(opt.trace_path, std::ios::app);
        trace_file << "# kernel " << spec.id << "\n";
        fabric.set_trace([&](const TraceEvent& e) {
            trace_file << e.cycle << "," << e.site << "," << e.kind << "," << e.value << "\n";
        });
    }

    gen_inputs(prep, mem.image(), spec.seed);
    MemoryImage input_copy = mem.image();

    for (size_t p = 0; p < prep.phases.size(); ++p) {
        auto shots = expand_shots(prep.phases[p], prep.placed[p], prep.phase_regions[p],
                                  prep.image_addr[p],
                                  static_cast<Word>(prep.images[p].size()));
        ctrl.run_shots(shots, opt.host_overhead);
    }

    const PerfCounters counters = ctrl.snapshot_counters();
    ReportRow row;
    row.kernel = spec.id;
    row.dims = dims_to_string(spec.dims);
    row.one_shot = spec.one_shot;
    row.config_cycles = counters.config_cycles;
    row.exec_cycles = counters.exec_cycles;
    row.control_cycles = counters.control_cycles;
    row.total_cycles = counters.total_cycles;
    row.operations = count_ops(spec.id, spec.dims);
    row.outputs = prep.outputs;
    const uint64_t perf_cycles = spec.one_shot ? counters.exec_cycles : counters.total_cycles;
    if (perf_cycles) {
        row.outputs_per_cycle = static_cast<double>(prep.outputs) / perf_cycles;
        row.mops_at_250mhz = static_cast<double>(row.operations) * 250.0 / perf_cycles;
    }
    row.input_ii = measure_input_ii(counters);
    row.shots = counters.shots;
    row.max_interleaved_grants = counters.max_interleaved_grants;

    row.oracle_pass = true;
    const OracleResult expected = oracle_eval(spec, prep, input_copy);
    for (const auto& [addr, value] : expected) {
        if (mem.image().load(addr) != value) {
            row.oracle_pass = false;
            std::ostringstream os;
            os << "first mismatch at 0x" << std::hex << addr << ": got 0x"
               << mem.image().load(addr) << " expected 0x" << value << std::dec;
            row.note = os.str();
            if (hard_fail) throw OracleMismatch(spec.id + ": " + row.note);
            break;
        }
    }
    return row;
}

Report run_bench(const std::vector<BenchmarkSpec>& specs, const BenchOptions& opt,
                 bool hard_fail) {
    Report report;
    report.seed = specs.empty() ? 0 : specs.front().seed;
    report.interleaved_banks = opt.interleaved_banks;
    report.rows = opt.grid_rows;
    report.cols = opt.grid_cols;
    report.host_overhead = opt.host_overhead;
    report.version = tool_version();
    for (const auto& spec : specs) report.rows_out.push_back(run_benchmark(spec, opt, hard_fail));
    return report;
}

std::string report_to_json(const Report& report) {
    nlohmann::ordered_json j;
    j["version"] = report.version;
    j["seed"] = report.seed;
    j["grid"] = {report.rows, report.cols};
    j["interleaved_banks"] = report.interleaved_banks;
    j["host_overhead"] = report.host_overhead;
    j["kernels"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows_out) {
        nlohmann::ordered_json k;
        k["kernel"] = r.kernel;
        k["dims"] = r.dims;
        k["class"] = r.one_shot ? "one-shot" : "multi-shot";
        k["configuration_cycles"] = r.config_cycles;
        k["execution_cycles"] = r.exec_cycles;
        k["control_cycles"] = r.control_cycles;
        k["total_cycles"] = r.total_cycles;
        k["operations"] = r.operations;
        k["outputs"] = r.outputs;
        k["outputs_per_cycle"] = r.outputs_per_cycle;
        k["mops_at_250mhz"] = r.mops_at_250mhz;
        k["shots"] = r.shots;
        k["max_interleaved_grants_per_cycle"] = r.max_interleaved_grants;
        if (r.input_ii.valid) {
            k["input_ii"] = r.input_ii.aggregate;
            k["input_ii_halves"] = {r.input_ii.first_half, r.input_ii.second_half};
        }
        k["oracle"] = r.oracle_pass ? "pass" : "FAIL";
        if (!r.note.empty()) k["note"] = r.note;
        j["kernels"].push_back(std::move(k));
    }
    return j.dump(2) + "\n";
}

std::string report_to_table(const Report& report) {
    std::ostringstream os;
    auto line = [&](const std::string& a, const std::string& b, const std::string& c,
                    const std::string& d, const std::string& e, const std::string& f,
                    const std::string& g, const std::string& h) {
        os << a;
        for (size_t i = a.size(); i < 10; ++i) os << ' ';
        auto col = [&](const std::string& s, size_t w) {
            for (size_t i = s.size(); i < w; ++i) os << ' ';
            os << s;
        };
        col(b, 8);
        col(c, 12);
        col(d, 12);
        col(e, 12);
        col(f, 12);
        col(g, 15);
        col(h, 8);
        os << "\n";
    };
    line("kernel", "config", "execution", "total", "operations", "outputs", "outputs/cycle",
         "oracle");
    for (const auto& r : report.rows_out) {
        std::ostringstream oc;
        oc.precision(3);
        oc << std::scientific << r.outputs_per_cycle;
        line(r.kernel, std::to_string(r.config_cycles), std::to_string(r.exec_cycles),
             std::to_string(r.total_cycles), std::to_string(r.operations),
             std::to_string(r.outputs), oc.str(), r.oracle_pass ? "pass" : "FAIL");
    }
    return os.str();
}

std::vector<BenchmarkSpec> default_suite() {
    std::vector<BenchmarkSpec> suite;

    {
        BenchmarkSpec s;
        s.id = "fft";
        s.one_shot = true;
        s.dims = {{"n", 256}};
        s.outputs = "4*n";
        s.phases = {{"fft.json", {}, {}}};
        s.regions = {
            {"ar", "n", "rand", 0xFFFF, "interleaved", 0},
            {"br", "n", "rand", 0x3FFF, "interleaved", 1},
            {"bi", "n", "rand", 0x3FFF, "interleaved", 2},
            {"ai", "n", "rand", 0xFFFF, "interleaved", 3},
            {"Ar", "n", "zero", 0xFFFFFFFF, "interleaved", 4},
            {"Br", "n", "zero", 0xFFFFFFFF, "interleaved", 5},
            {"Bi", "n", "zero", 0xFFFFFFFF, "interleaved", 6},
            {"Ai", "n", "zero", 0xFFFFFFFF, "interleaved", 7},
        };
        suite.push_back(std::move(s));
    }
    {
        BenchmarkSpec s;
        s.id = "relu";
        s.one_shot = true;
        s.dims = {{"n", 341}};
        s.outputs = "3*n";
        s.phases = {{"relu.json", {}, {}}};
        s.regions = {
            {"x0", "n", "rand", 0xFFFFFFFF, "interleaved", 0},
            {"x1", "n", "rand", 0xFFFFFFFF, "interleaved", 1},
            {"x2", "n", "rand", 0xFFFFFFFF, "interleaved", 2},
            {"y0", "n", "zero", 0xFFFFFFFF, "interleaved", 4},
            {"y1", "n", "zero", 0xFFFFFFFF, "interleaved", 5},
            {"y2", "n", "zero", 0xFFFFFFFF, "interleaved", 6},
        };
        suite.push_back(std::move(s));
    }
    {
        BenchmarkSpec s;
        s.id = "dither";
        s.one_shot = true;
        s.dims = {{"n", 512}};
        s.outputs = "2*n";
        s.phases = {{"dither.json", {}, {}}};
        s.regions = {
            {"p0", "n", "rand", 0xFF, "interleaved", 0},
            {"p1", "n", "rand", 0xFF, "interleaved", 2},
            {"o0", "n", "zero", 0xFFFFFFFF, "interleaved", 1},
            {"o1", "n", "zero", 0xFFFFFFFF, "interleaved", 3},
        };
        suite.push_back(std::move(s));
    }
    {
        BenchmarkSpec s;
        s.id = "find2min";
        s.one_shot = true;
        s.dims = {{"n", 1024}};
        s.outputs = "2";
        s.phases = {{"find2min.json", {}, {}}};
        s.regions = {
            {"x", "n", "rand", 0x1FFFFF, "interleaved", 0},
            {"r1", "1", "zero", 0xFFFFFFFF, "interleaved", 1},
            {"r2", "1", "zero", 0xFFFFFFFF, "interleaved", 2},
        };
        suite.push_back(std::move(s));
    }

    auto mm_spec = [](const std::string& id, int64_t n) {
        BenchmarkSpec s;
        s.id = id;
        s.dims = {{"n", n}};
        s.outputs = "n*n";
        s.phases = {{"mm.json",
                     {{"m", n}, {"n", n}, {"kd", n}, {"bcol", 1}, {"bstride", n}},
                     {}}};
        s.regions = {
            {"A", "n*n", "rand", 0xFFFF, "bank1", -1},
            {"B", "n*n", "rand", 0xFFFF, "interleaved", 1},
            {"C", "n*n", "zero", 0xFFFFFFFF, "bank2", -1},
            {"Bpad", "1", "zero", 0xFFFFFFFF, "interleaved", -1},
            {"scrap", "1", "zero", 0xFFFFFFFF, "bank2", -1},
        };
        return s;
    };
    suite.push_back(mm_spec("mm16", 16));
    suite.push_back(mm_spec("mm64", 64));

    {
        BenchmarkSpec s;
        s.id = "conv2d";
        s.dims = {{"w", 64}, {"h", 64}};
        s.outputs = "(w-2)*(h-2)";
        s.phases = {{"conv2d.json", {}, {}}};
        s.regions = {
            {"img", "w*h", "rand", 0xFF, "interleaved", 0},
            {"Pa", "w*h", "zero", 0xFFFFFFFF, "bank2", -1},
            {"Pb", "w*h", "zero", 0xFFFFFFFF, "bank1", -1},
        };
        suite.push_back(std::move(s));
    }
    {
        BenchmarkSpec s;
        s.id = "gemm"; // C = alpha*A*B + beta*C, SMALL dataset
        s.dims = {{"ni", 60}, {"nj", 70}, {"nk", 80}, {"alpha", 3}, {"beta", 2}};
        s.outputs = "ni*nj";
        s.phases = {
            {"mms.json",
             {{"m", 60}, {"n", 70}, {"kd", 80}, {"bcol", 1}, {"bstride", 70}},
             {{"A", "gA"}, {"B", "gB"}, {"C", "gT"}, {"Bpad", "pad"}, {"scrap", "scrap"}}},
            {"axpby.json",
             {{"n", 60 * 70}, {"c2", 2}},
             {{"X", "gT"}, {"Y", "gC"}, {"OUT", "gC"}}},
        };
        s.regions = {
            {"gA", "ni*nk", "rand", 0x3FF, "bank1", -1},
            {"gB", "nk*nj", "rand", 0x3FF, "interleaved", 1},
            {"gT", "ni*nj", "zero", 0xFFFFFFFF, "bank2", -1},
            {"gC", "ni*nj", "rand", 0x3FF, "interleaved", 3},
            {"pad", "nk", "zero", 0xFFFFFFFF, "interleaved", -1},
            {"scrap", "1", "zero", 0xFFFFFFFF, "bank2", -1},
        };
        suite.push_back(std::move(s));
    }
    {
        BenchmarkSpec s;
        s.id = "gemver";
        s.dims = {{"n", 120}, {"alpha", 3}, {"beta", 2}};
        s.outputs = "n*n + 2*n"; // A_hat, x and w are results
        s.phases = {
            {"rank1.json", {{"rows", 120}, {"n", 120}},
             {{"M", "vA"}, {"V", "vv1"}, {"U", "vu1"}, {"OUT", "vT"}}},
            {"rank1.json", {{"rows", 120}, {"n", 120}},
             {{"M", "vT"}, {"V", "vv2"}, {"U", "vu2"}, {"OUT", "vAh"}}},
            {"mm.json", // t = Ah^T * y as one row of column dot products
             {{"m", 1}, {"n", 120}, {"kd", 120}, {"bcol", 1}, {"bstride", 120}},
             {{"A", "vy"}, {"B", "vAh"}, {"C", "vt"}, {"Bpad", "pad"}, {"scrap", "scrap"}}},
            {"lin3.json", {{"n", 120}, {"c2", 2}},
             {{"X", "vx"}, {"Y", "vt"}, {"Z", "vz"}, {"OUT", "vx"}}},
            {"mms.json", // w = alpha * (Ah . x): row dot products
             {{"m", 1}, {"n", 120}, {"kd", 120}, {"bcol", 120}, {"bstride", 1}, {"alpha", 3}},
             {{"A", "vx"}, {"B", "vAh"}, {"C", "vw"}, {"Bpad", "pad"}, {"scrap", "scrap"}}},
        };
        s.regions = {
            {"vA", "n*n", "rand", 0x3FF, "interleaved", 0},
            {"vT", "n*n", "zero", 0xFFFFFFFF, "interleaved", 2},
            {"vAh", "n*n", "zero", 0xFFFFFFFF, "interleaved", 1},
            {"vu1", "n", "rand", 0x3FF, "bank1", -1},
            {"vv1", "n", "rand", 0x3FF, "interleaved", 3},
            {"vu2", "n", "rand", 0x3FF, "bank1", -1},
            {"vv2", "n", "rand", 0x3FF, "interleaved", 3},
            {"vx", "n", "rand", 0x3FF, "bank1", -1},
            {"vy", "n", "rand", 0x3FF, "bank1", -1},
            {"vz", "n", "rand", 0x3FF, "bank2", -1},
            {"vt", "n", "zero", 0xFFFFFFFF, "bank2", -1},
            {"vw", "n", "zero", 0xFFFFFFFF, "bank3", -1},
            {"pad", "n", "zero", 0xFFFFFFFF, "interleaved", -1},
            {"scrap", "1", "zero", 0xFFFFFFFF, "bank3", -1},
        };
        suite.push_back(std::move(s));
    }
    {
        BenchmarkSpec s;
        s.id = "gesummv";
        s.dims = {{"n", 90}, {"alpha", 3}, {"beta", 2}};
        s.outputs = "n";
        s.phases = {{"sumdots.json", {}, {}}};
        s.regions = {
            {"sA", "n*n", "rand", 0x3FF, "interleaved", 0},
            {"sB", "n*n", "rand", 0x3FF, "interleaved", 2},
            {"sx", "n", "rand", 0x3FF, "bank1", -1},
            {"sy", "n", "zero", 0xFFFFFFFF, "bank2", -1},
        };
        suite.push_back(std::move(s));
    }
    {
        BenchmarkSpec s;
        s.id = "2mm"; // D = alpha*A*B*C + beta*D
        s.dims = {{"ni", 40}, {"nj", 50}, {"nk", 70}, {"nl", 80}, {"alpha", 3}, {"beta", 2}};
        s.outputs = "ni*nl";
        s.phases = {
            {"mms.json",
             {{"m", 40}, {"n", 50}, {"kd", 70}, {"bcol", 1}, {"bstride", 50}, {"alpha", 3}},
             {{"A", "mA"}, {"B", "mB"}, {"C", "mT"}, {"Bpad", "pad"}, {"scrap", "scrap"}}},
            {"mm.json",
             {{"m", 40}, {"n", 80}, {"kd", 50}, {"bcol", 1}, {"bstride", 80}},
             {{"A", "mT"}, {"B", "mC"}, {"C", "mS"}, {"Bpad", "pad"}, {"scrap", "scrap"}}},
            {"axpby.json", {{"n", 40 * 80}, {"c2", 2}},
             {{"X", "mS"}, {"Y", "mD"}, {"OUT", "mD"}}},
        };
        s.regions = {
            {"mA", "ni*nk", "rand", 0x3FF, "bank1", -1},
            {"mB", "nk*nj", "rand", 0x3FF, "interleaved", 1},
            {"mT", "ni*nj", "zero", 0xFFFFFFFF, "bank2", -1},
            {"mC", "nj*nl", "rand", 0x3FF, "interleaved", 2},
            {"mS", "ni*nl", "zero", 0xFFFFFFFF, "bank3", -1},
            {"mD", "ni*nl", "rand", 0x3FF, "interleaved", 3},
            {"pad", "nk", "zero", 0xFFFFFFFF, "interleaved", -1},
            {"scrap", "1", "zero", 0xFFFFFFFF, "bank3", -1},
        };
        suite.push_back(std::move(s));
    }
    {
        BenchmarkSpec s;
        s.id = "3mm"; // G = (A*B)*(C*D)
        s.dims = {{"ni", 40}, {"nj", 50}, {"nk", 60}, {"nl", 70}, {"nm", 80}};
        s.outputs = "ni*nl";
        s.phases = {
            {"mm.json",
             {{"m", 40}, {"n", 50}, {"kd", 60}, {"bcol", 1}, {"bstride", 50}},
             {{"A", "tA"}, {"B", "tB"}, {"C", "tE"}, {"Bpad", "pad"}, {"scrap", "scrap"}}},
            {"mm.json",
             {{"m", 50}, {"n", 70}, {"kd", 80}, {"bcol", 1}, {"bstride", 70}},
             {{"A", "tC"}, {"B", "tD"}, {"C", "tF"}, {"Bpad", "pad"}, {"scrap", "scrap"}}},
            {"mm.json",
             {{"m", 40}, {"n", 70}, {"kd", 50}, {"bcol", 1}, {"bstride", 70}},
             {{"A", "tE"}, {"B", "tF"}, {"C", "tG"}, {"Bpad", "pad"}, {"scrap", "scrap"}}},
        };
        s.regions = {
            {"tA", "ni*nk", "rand", 0x3FF, "bank1", -1},
            {"tB", "nk*nj", "rand", 0x3FF, "interleaved", 1},
            {"tE", "ni*nj", "zero", 0xFFFFFFFF, "bank2", -1},
            {"tC", "nj*nm", "rand", 0x3FF, "interleaved", 2},
            {"tD", "nm*nl", "rand", 0x3FF, "interleaved", 3},
            {"tF", "nj*nl", "zero", 0xFFFFFFFF, "bank3", -1},
            {"tG", "ni*nl", "zero", 0xFFFFFFFF, "bank2", -1},
            {"pad", "nm", "zero", 0xFFFFFFFF, "interleaved", -1},
            {"scrap", "1", "zero", 0xFFFFFFFF, "bank3", -1},
        };
        suite.push_back(std::move(s));
    }
    return suite;
}

} // namespace ecgra
