#include "ecgra/mapper.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ecgra {

using nlohmann::json;

namespace {

int64_t json_expr(const json& j, const ExprEnv& env, const char* what) {
    if (j.is_number_integer()) return j.get<int64_t>();
    if (j.is_string()) return eval_expr(j.get<std::string>(), env);
    throw ParseError(std::string("expected integer or expression for ") + what);
}

AluOp parse_alu_op(const std::string& s) {
    if (s == "add") return AluOp::Add;
    if (s == "sub") return AluOp::Sub;
    if (s == "mult") return AluOp::Mult;
    if (s == "shl") return AluOp::Shl;
    if (s == "shr") return AluOp::Shr;
    if (s == "and") return AluOp::And;
    if (s == "or") return AluOp::Or;
    if (s == "xor") return AluOp::Xor;
    throw ParseError("unknown alu op '" + s + "'");
}

CmpOp parse_cmp_op(const std::string& s) {
    if (s == "eq0") return CmpOp::EqZero;
    if (s == "gt0") return CmpOp::GtZero;
    throw ParseError("unknown compare op '" + s + "'");
}

NodeKind parse_kind(const std::string& s) {
    if (s == "input") return NodeKind::Input;
    if (s == "output") return NodeKind::Output;
    if (s == "const") return NodeKind::Const;
    if (s == "alu") return NodeKind::Alu;
    if (s == "compare") return NodeKind::Compare;
    if (s == "branch") return NodeKind::Branch;
    if (s == "merge") return NodeKind::Merge;
    if (s == "select") return NodeKind::Select;
    throw ParseError("unknown node kind '" + s + "'");
}

std::pair<std::string, std::string> split_from(const std::string& s) {
    auto p = s.find(':');
    if (p == std::string::npos) return {s, ""};
    return {s.substr(0, p), s.substr(p + 1)};
}

std::pair<std::string, std::string> split_to(const std::string& s) {
    auto p = s.rfind('.');
    if (p == std::string::npos) return {s, ""};
    std::string port = s.substr(p + 1);
    if (port == "a" || port == "b" || port == "ctrl") return {s.substr(0, p), port};
    return {s, ""};
}

} // namespace

KernelManifest parse_manifest(const std::string& text, const ExprEnv& dim_overrides) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
    }
    try {
        KernelManifest m;
        m.name = j.value("name", "kernel");
        if (j.contains("grid")) {
            m.rows = j["grid"][0].get<int>();
            m.cols = j["grid"][1].get<int>();
        }
        if (j.contains("dims"))
            for (auto& [k, v] : j["dims"].items()) m.dims[k] = v.get<int64_t>();
        for (const auto& [k, v] : dim_overrides) m.dims[k] = v;

        for (const auto& r : j.value("regions", json::array())) {
            RegionDecl d;
            d.name = r.at("name").get<std::string>();
            d.words = r.at("words").is_string() ? r["words"].get<std::string>()
                                                : std::to_string(r["words"].get<int64_t>());
            d.init = r.value("init", "zero");
            if (r.contains("mask"))
                d.mask = static_cast<Word>(json_expr(r["mask"], m.dims, "mask"));
            d.space = r.value("space", "interleaved");
            d.phase = r.value("phase", -1);
            m.regions.push_back(std::move(d));
        }

        DFG base;
        for (const auto& n : j.at("nodes")) {
            DFGNode node;
            node.id = n.at("id").get<std::string>();
            node.kind = parse_kind(n.at("kind").get<std::string>());
            if (n.contains("op")) node.op = parse_alu_op(n["op"].get<std::string>());
            if (node.kind == NodeKind::Compare)
                node.cmp = parse_cmp_op(n.value("cmp", "gt0"));
            node.feedback = n.value("feedback", false);
            if (n.contains("delay"))
                node.delay = static_cast<int>(json_expr(n["delay"], m.dims, "delay"));
            if (n.contains("value"))
                node.value = static_cast<Word>(json_expr(n["value"], m.dims, "value"));
            if (n.contains("init"))
                node.init = static_cast<Word>(json_expr(n["init"], m.dims, "init"));
            base.nodes.push_back(std::move(node));
        }
        for (const auto& e : j.at("edges")) {
            DFGEdge edge;
            auto [src, sp] = split_from(e.at("from").get<std::string>());
            auto [dst, dp] = split_to(e.at("to").get<std::string>());
            edge.src = src;
            edge.src_port = sp;
            edge.dst = dst;
            edge.dst_port = dp;
            edge.back = e.value("back", false);
            base.edges.push_back(std::move(edge));
        }

        const int k = j.value("unroll", 1);
        m.dfg = unroll(base, k);

        for (auto& [node, rc] : j.value("placement", json::object()).items())
            m.placement[node] = {rc[0].get<int>(), rc[1].get<int>()};

        for (auto& [node, s] : j.value("streams", json::object()).items()) {
            const DFGNode* n = m.dfg.find(node);
            if (!n) throw ParseError("stream binding for unknown node '" + node + "'");
            const int col = s.at("column").get<int>();
            const std::string border =
                s.value("border", n->kind == NodeKind::Input ? "north" : "south");
            if (n->kind == NodeKind::Input) {
                m.input_columns[node] = col;
                if (border != "north")
                    throw UnboundStream("input '" + node + "' must enter on the north border");
            } else if (n->kind == NodeKind::Output) {
                m.output_columns[node] = col;
                if (border != "south")
                    throw UnboundStream("output '" + node + "' must leave on the south border");
            } else {
                throw ParseError("stream binding on non-stream node '" + node + "'");
            }
        }
        for (const auto& n : m.dfg.nodes) {
            if (n.kind == NodeKind::Input && !m.input_columns.count(n.id))
                throw UnboundStream("input '" + n.id + "' has no column binding");
            if (n.kind == NodeKind::Output && !m.output_columns.count(n.id))
                throw UnboundStream("output '" + n.id + "' has no column binding");
        }

        for (auto& [key, pts] : j.value("vias", json::object()).items()) {
            std::vector<std::pair<int, int>> v;
            for (const auto& p : pts) v.emplace_back(p[0].get<int>(), p[1].get<int>());
            m.vias[key] = std::move(v);
        }

        for (const auto& s : j.value("shots", json::array())) {
            ShotDecl decl;
            for (const auto& l : s.value("loops", json::array()))
                decl.loops.emplace_back(l[0].get<std::string>(), l[1].get<std::string>());
            decl.reconfigure = s.value("reconfigure", "first");
            for (auto& [node, st] : s.at("streams").items()) {
                ShotStream stream;
                stream.base = st.at("base").is_string()
                                  ? st["base"].get<std::string>()
                                  : std::to_string(st["base"].get<int64_t>());
                stream.size = st.at("size").is_string()
                                  ? st["size"].get<std::string>()
                                  : std::to_string(st["size"].get<int64_t>());
                if (st.contains("stride"))
                    stream.stride = st["stride"].is_string()
                                        ? st["stride"].get<std::string>()
                                        : std::to_string(st["stride"].get<int64_t>());
                decl.streams[node] = std::move(stream);
            }
            m.shots.push_back(std::move(decl));
        }
        if (m.shots.empty()) throw ParseError("manifest has an empty shot schedule");
        m.outputs_expr = j.value("outputs", "0");

        auto diags = validate_dfg(m.dfg);
        if (!diags.empty()) throw ParseError(m.name + ": " + diags.front());
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
}

KernelManifest load_manifest_file(const std::string& path, const ExprEnv& dim_overrides) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open manifest: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_manifest(ss.str(), dim_overrides);
}

std::vector<std::string> validate_placement(const KernelManifest& m) {
    std::vector<std::string> diags;
    std::map<std::pair<int, int>, std::string> occupied;
    for (const auto& n : m.dfg.nodes) {
        const bool needs_pe = n.kind != NodeKind::Input && n.kind != NodeKind::Output &&
                              n.kind != NodeKind::Const;
        auto it = m.placement.find(n.id);
        if (!needs_pe) {
            if (it != m.placement.end())
                diags.push_back("node '" + n.id + "' does not occupy a PE but is placed");
            continue;
        }
        if (it == m.placement.end()) {
            diags.push_back("compute node '" + n.id + "' is not placed");
            continue;
        }
        auto [r, c] = it->second;
        if (r < 0 || r >= m.rows || c < 0 || c >= m.cols) {
            diags.push_back("node '" + n.id + "' placed outside the grid");
            continue;
        }
        auto [prev, inserted] = occupied.try_emplace({r, c}, n.id);
        if (!inserted)
            diags.push_back("nodes '" + prev->second + "' and '" + n.id +
                            "' share pe(" + std::to_string(r) + "," + std::to_string(c) +
                            "): one compute node per PE, comparisons in isolation");
    }
    for (const auto& [id, col] : m.input_columns)
        if (col < 0 || col >= m.cols)
            diags.push_back("input '" + id + "' bound to column " + std::to_string(col));
    for (const auto& [id, col] : m.output_columns)
        if (col < 0 || col >= m.cols)
            diags.push_back("output '" + id + "' bound to column " + std::to_string(col));
    // distinct nodes per border column
    std::map<int, std::string> in_cols, out_cols;
    for (const auto& [id, col] : m.input_columns) {
        auto [prev, ok] = in_cols.try_emplace(col, id);
        if (!ok) diags.push_back("inputs '" + prev->second + "' and '" + id +
                                 "' share column " + std::to_string(col));
    }
    for (const auto& [id, col] : m.output_columns) {
        auto [prev, ok] = out_cols.try_emplace(col, id);
        if (!ok) diags.push_back("outputs '" + prev->second + "' and '" + id +
                                 "' share column " + std::to_string(col));
    }
    return diags;
}

namespace {

/// Routing state for one PE while the router runs.
struct PERes {
    std::array<int, 4> in_signal{-1, -1, -1, -1};
    std::array<uint8_t, 4> in_fork{};
    std::array<int, 4> out_signal{-1, -1, -1, -1};
    std::array<OutMuxSel, 4> out_sel{OutMuxSel::Disabled, OutMuxSel::Disabled,
                                     OutMuxSel::Disabled, OutMuxSel::Disabled};
    uint8_t fu_fork = 0;
    int compute_node = -1; // index into dfg.nodes
    bool used() const {
        if (compute_node >= 0 || fu_fork) return true;
        for (int p = 0; p < 4; ++p)
            if (in_signal[p] >= 0 || in_fork[p]) return true;
        return false;
    }
};

struct Router {
    const KernelManifest& m;
    int R, C;
    std::vector<PERes> res;
    // signal id -> in-ports where the signal is already available
    std::map<int, std::set<std::pair<int, int>>> tree;
    std::map<std::string, int> signal_ids;
    std::vector<std::pair<std::string, std::string>> signal_defs; // (node, class)
    std::map<std::string, std::vector<RouteHop>> routes;

    explicit Router(const KernelManifest& manifest)
        : m(manifest), R(manifest.rows), C(manifest.cols), res(R * C) {}

    int pe_of(int r, int c) const { return r * C + c; }

    int signal_id(const std::string& node, const std::string& cls) {
        const std::string key = node + ":" + cls;
        auto it = signal_ids.find(key);
        if (it != signal_ids.end()) return it->second;
        int id = static_cast<int>(signal_defs.size());
        signal_ids[key] = id;
        signal_defs.emplace_back(node, cls);
        return id;
    }

    OutMuxSel class_mux(const std::string& cls) const {
        if (cls == "t") return OutMuxSel::B1;
        if (cls == "f") return OutMuxSel::B2;
        if (cls == "d") return OutMuxSel::FUDelayed;
        return OutMuxSel::FU;
    }

    /// Out-class of the plain output of a node: reductions emit through the
    /// delayed valid, everything else through the unprocessed one.
    std::string plain_class(const DFGNode& n) const {
        return (n.kind == NodeKind::Alu && n.feedback) ? "d" : "";
    }

    struct Step {
        int prev_state; // -1 = production/root seed
        int out_dir;    // direction taken from prev into this state
        bool from_prod;
    };

    /// Breadth-first search of the signal from its existing tree (plus the
    /// production site) to `goal`; goal is "some in-port of goal_pe", or any
    /// state from which the south out-port of goal_pe can be claimed when
    /// to_south_border is set. Commits the found path into the resources and
    /// returns the in-port of goal_pe now carrying the signal (-1 when the
    /// producer drives the south border directly).
    int route_segment(int sig, const std::string& edge_key, int goal_pe,
                      bool to_south_border) {
        const auto [src_node, cls] = signal_defs[sig];
        const DFGNode* src = m.dfg.find(src_node);
        const bool from_input = src && src->kind == NodeKind::Input;
        int prod_pe = -1;
        if (!from_input) {
            auto it = m.placement.find(src_node);
            if (it == m.placement.end())
                throw Unroutable(edge_key + ": producer '" + src_node + "' is not placed");
            prod_pe = pe_of(it->second.first, it->second.second);
        }

        // Direct production at the target PE: claim the south port.
        if (to_south_border && prod_pe == goal_pe) {
            PERes& pr = res[prod_pe];
            if (pr.out_signal[DIR_S] >= 0 && pr.out_signal[DIR_S] != sig)
                throw Unroutable(edge_key + ": south port of the producer is taken");
            pr.out_signal[DIR_S] = sig;
            pr.out_sel[DIR_S] = class_mux(cls);
            pr.fu_fork |= 1u << DIR_S;
            return -1;
        }

        const int n_states = R * C * 4;
        std::vector<Step> parent(n_states, Step{-2, -1, false});
        std::deque<int> queue;

        auto try_seed = [&](int state, Step step) {
            if (parent[state].prev_state != -2) return;
            parent[state] = step;
            queue.push_back(state);
        };

        // Existing tree sites are free starting points.
        for (const auto& [pe, port] : tree[sig])
            try_seed(pe * 4 + port, Step{-1, -1, false});

        if (from_input) {
            const int col = m.input_columns.at(src_node);
            const int pe = pe_of(0, col);
            if (res[pe].in_signal[DIR_N] < 0 || res[pe].in_signal[DIR_N] == sig)
                try_seed(pe * 4 + DIR_N, Step{-1, -1, false});
        } else {
            // Production exits: one hop from the FU fork into a neighbor.
            const int pr = prod_pe, r = pr / C, c = pr % C;
            for (int d = 0; d < 4; ++d) {
                const int nr = r + (d == DIR_S) - (d == DIR_N);
                const int nc = c + (d == DIR_E) - (d == DIR_W);
                if (nr < 0 || nr >= R || nc < 0 || nc >= C) continue;
                const PERes& pres = res[pr];
                if (pres.out_signal[d] >= 0 &&
                    !(pres.out_signal[d] == sig && pres.out_sel[d] == class_mux(cls)))
                    continue;
                const int npe = pe_of(nr, nc);
                const int nport = flip_dir(d);
                if (res[npe].in_signal[nport] >= 0 && res[npe].in_signal[nport] != sig)
                    continue;
                try_seed(npe * 4 + nport, Step{-1, d, true});
            }
        }

        int goal_state = -1;
        while (!queue.empty()) {
            const int st = queue.front();
            queue.pop_front();
            const int pe = st / 4, port = st % 4;
            if (pe == goal_pe) {
                if (!to_south_border) {
                    goal_state = st;
                    break;
                }
                const PERes& pr = res[pe];
                if (pr.out_signal[DIR_S] < 0 || pr.out_signal[DIR_S] == sig) {
                    goal_state = st;
                    break;
                }
            }
            const int r = pe / C, c = pe % C;
            for (int k = 0; k < 3; ++k) {
                const int d = other_port(port, k);
                const int nr = r + (d == DIR_S) - (d == DIR_N);
                const int nc = c + (d == DIR_E) - (d == DIR_W);
                if (nr < 0 || nr >= R || nc < 0 || nc >= C) continue;
                const PERes& pres = res[pe];
                const OutMuxSel pass_sel = static_cast<OutMuxSel>(other_port_lane(d, port));
                if (pres.out_signal[d] >= 0 &&
                    !(pres.out_signal[d] == sig && pres.out_sel[d] == pass_sel))
                    continue;
                const int npe = pe_of(nr, nc);
                const int nport = flip_dir(d);
                if (res[npe].in_signal[nport] >= 0 && res[npe].in_signal[nport] != sig)
                    continue;
                try_seed(npe * 4 + nport, Step{st, d, false});
            }
        }
        if (goal_state < 0)
            throw Unroutable(edge_key + ": no path to pe(" + std::to_string(goal_pe / C) +
                             "," + std::to_string(goal_pe % C) + ")");

        // Commit the path back to its root.
        std::vector<RouteHop> hops;
        int st = goal_state;
        while (true) {
            const Step step = parent[st];
            const int pe = st / 4, port = st % 4;
            res[pe].in_signal[port] = sig;
            tree[sig].insert({pe, port});
            hops.push_back(RouteHop{pe, port, -1});
            if (step.prev_state == -1 && !step.from_prod) break; // tree/input root
            if (step.from_prod) {
                PERes& pr = res[prod_pe];
                pr.fu_fork |= 1u << step.out_dir;
                pr.out_signal[step.out_dir] = sig;
                pr.out_sel[step.out_dir] = class_mux(cls);
                break;
            }
            const int ppe = step.prev_state / 4, pport = step.prev_state % 4;
            PERes& prev = res[ppe];
            prev.in_fork[pport] |= 1u << (FORK_OUT_P1 + other_port_lane(pport, step.out_dir));
            prev.out_signal[step.out_dir] = sig;
            prev.out_sel[step.out_dir] =
                static_cast<OutMuxSel>(other_port_lane(step.out_dir, pport));
            st = step.prev_state;
        }
        std::reverse(hops.begin(), hops.end());
        auto& rec = routes[edge_key];
        rec.insert(rec.end(), hops.begin(), hops.end());

        const int goal_port = goal_state % 4;
        if (to_south_border) {
            PERes& pr = res[goal_pe];
            pr.in_fork[goal_port] |=
                1u << (FORK_OUT_P1 + other_port_lane(goal_port, DIR_S));
            pr.out_signal[DIR_S] = sig;
            pr.out_sel[DIR_S] =
                static_cast<OutMuxSel>(other_port_lane(DIR_S, goal_port));
        }
        return goal_port;
    }

    /// Fill out_port fields of the recorded hops for readability.
    void finish_route_record(const std::string& edge_key) {
        auto it = routes.find(edge_key);
        if (it == routes.end()) return;
        auto& hops = it->second;
        for (size_t i = 0; i + 1 < hops.size(); ++i) {
            // direction from hop i's pe to hop i+1's pe
            const int pe = hops[i].pe, npe = hops[i + 1].pe;
            const int r = pe / C, c = pe % C, nr = npe / C, nc = npe % C;
            if (nr == r + 1) hops[i].out_port = DIR_S;
            else if (nr == r - 1) hops[i].out_port = DIR_N;
            else if (nc == c + 1) hops[i].out_port = DIR_E;
            else if (nc == c - 1) hops[i].out_port = DIR_W;
        }
    }
};

} // namespace

PlacedKernel route_kernel(const KernelManifest& m) {
    auto placement_diags = validate_placement(m);
    if (!placement_diags.empty())
        throw Unroutable("placement invalid: " + placement_diags.front());

    Router router(m);
    // Mark compute PEs.
    std::map<std::string, int> node_index;
    for (size_t i = 0; i < m.dfg.nodes.size(); ++i) node_index[m.dfg.nodes[i].id] = (int)i;
    for (const auto& [id, rc] : m.placement)
        router.res[router.pe_of(rc.first, rc.second)].compute_node = node_index.at(id);

    struct Terminal {
        std::string who;  // for diagnostics
        std::string port; // a,b,ctrl
        Word const_value = 0;
        bool is_const = false;
        bool is_self = false;
        int in_port = -1; // routed arrivals
    };
    // Per-PE terminal assignments gathered while routing.
    std::map<int, std::vector<Terminal>> terminals;

    for (const auto& e : m.dfg.edges) {
        const DFGNode& src = m.dfg.at(e.src);
        const DFGNode& dst = m.dfg.at(e.dst);
        const std::string dst_port = e.dst_port.empty() ? "a" : e.dst_port;
        const std::string key = e.src + (e.src_port.empty() ? "" : ":" + e.src_port) + "->" +
                                e.dst + "." + dst_port;

        if (dst.kind == NodeKind::Output) {
            const int col = m.output_columns.at(e.dst);
            const int goal = router.pe_of(m.rows - 1, col);
            const std::string cls =
                e.src_port.empty() ? router.plain_class(src) : e.src_port;
            const int sig = router.signal_id(e.src, cls);
            auto via_it = m.vias.find(key);
            if (via_it != m.vias.end())
                for (auto [vr, vc] : via_it->second)
                    router.route_segment(sig, key, router.pe_of(vr, vc), false);
            router.route_segment(sig, key, goal, true);
            router.finish_route_record(key);
            continue;
        }

        // terminal on a compute PE
        auto pit = m.placement.find(e.dst);
        if (pit == m.placement.end()) throw Unroutable(key + ": consumer is not placed");
        const int goal = router.pe_of(pit->second.first, pit->second.second);

        if (src.kind == NodeKind::Const) {
            terminals[goal].push_back({e.src, dst_port, src.value, true, false, -1});
            continue;
        }
        if (e.src == e.dst) { // non-immediate feedback through the FB path
            terminals[goal].push_back({e.src, dst_port, 0, false, true, -1});
            router.res[goal].fu_fork |= 1u << (dst_port == "a" ? FUFORK_FB1 : FUFORK_FB2);
            continue;
        }
        const std::string cls = e.src_port.empty() ? router.plain_class(src) : e.src_port;
        const int sig = router.signal_id(e.src, cls);
        auto via_it = m.vias.find(key);
        if (via_it != m.vias.end())
            for (auto [vr, vc] : via_it->second)
                router.route_segment(sig, key, router.pe_of(vr, vc), false);
        const int in_port = router.route_segment(sig, key, goal, false);
        router.finish_route_record(key);
        if (in_port < 0) throw Unroutable(key + ": internal routing inconsistency");
        const int lane = dst_port == "a" ? FORK_FU_A : dst_port == "b" ? FORK_FU_B
                                                                       : FORK_FU_CTRL;
        router.res[goal].in_fork[in_port] |= 1u << lane;
        terminals[goal].push_back({e.src, dst_port, 0, false, false, in_port});
    }

    // Assemble per-PE configurations.
    PlacedKernel out;
    out.input_columns = m.input_columns;
    out.output_columns = m.output_columns;
    out.edge_routes = router.routes;

    for (int pe = 0; pe < m.rows * m.cols; ++pe) {
        const PERes& r = router.res[pe];
        if (!r.used()) continue;
        PEConfig cfg;
        cfg.pe_id = static_cast<uint8_t>(pe);
        cfg.out_mux_sel = r.out_sel;
        cfg.fu_fork_mask = r.fu_fork;
        for (int p = 0; p < 4; ++p) {
            cfg.in_fork_mask[p] = r.in_fork[p];
            if (r.in_signal[p] >= 0) cfg.eb_gate_mask |= 1u << p;
        }

        if (r.compute_node >= 0) {
            const DFGNode& n = m.dfg.nodes[r.compute_node];
            std::optional<Word> const_val;
            auto set_const = [&](Word v, const std::string& who) {
                if (const_val && *const_val != v)
                    throw InvalidConfig("pe " + std::to_string(pe) +
                                        ": two different constants needed by '" + who + "'");
                const_val = v;
            };
            switch (n.kind) {
            case NodeKind::Alu:
                cfg.alu_op = n.op;
                cfg.dp_mux_sel = DpMuxSel::Alu;
                if (n.feedback) {
                    cfg.alu_fb_sel = true;
                    cfg.init_data_reg = n.init.value_or(0);
                }
                break;
            case NodeKind::Compare:
                cfg.cmp_op = n.cmp;
                cfg.dp_mux_sel = DpMuxSel::Cmp;
                break;
            case NodeKind::Select:
                cfg.join_mode = JoinMergeMode::JoinWithControl;
                cfg.dp_mux_sel = DpMuxSel::Mux;
                break;
            case NodeKind::Branch:
                cfg.join_mode = JoinMergeMode::JoinWithControl;
                cfg.dp_mux_sel = DpMuxSel::Alu;
                cfg.alu_op = AluOp::Or;
                set_const(0, n.id);
                cfg.fu_in_b_sel = FuInSel::Const;
                cfg.eb_gate_mask |= 1u << GATE_FU_B;
                break;
            case NodeKind::Merge:
                cfg.join_mode = JoinMergeMode::Merge;
                cfg.dp_mux_sel = DpMuxSel::Mux;
                break;
            default:
                throw Unroutable("node '" + n.id + "' cannot occupy a PE");
            }
            if (n.delay > 0) cfg.delay_d = static_cast<uint8_t>(n.delay);
            if (n.init && !n.feedback) {
                cfg.init_data_reg = *n.init;
                cfg.init_valids |= 1u;
            }

            for (const auto& t : terminals[pe]) {
                if (t.is_const) {
                    set_const(t.const_value, t.who);
                    if (t.port == "a") {
                        cfg.fu_in_a_sel = FuInSel::Const;
                        cfg.eb_gate_mask |= 1u << GATE_FU_A;
                    } else if (t.port == "b") {
                        cfg.fu_in_b_sel = FuInSel::Const;
                        cfg.eb_gate_mask |= 1u << GATE_FU_B;
                    } else {
                        throw InvalidConfig("constant control input on pe " +
                                            std::to_string(pe));
                    }
                } else if (t.is_self) {
                    if (t.port == "a") {
                        cfg.fu_in_a_sel = FuInSel::Feedback;
                        cfg.eb_gate_mask |= 1u << GATE_FU_A;
                    } else {
                        cfg.fu_in_b_sel = FuInSel::Feedback;
                        cfg.eb_gate_mask |= 1u << GATE_FU_B;
                    }
                } else {
                    if (t.port == "a") {
                        cfg.fu_in_a_sel = static_cast<FuInSel>(t.in_port);
                        cfg.eb_gate_mask |= 1u << GATE_FU_A;
                    } else if (t.port == "b") {
                        cfg.fu_in_b_sel = static_cast<FuInSel>(t.in_port);
                        cfg.eb_gate_mask |= 1u << GATE_FU_B;
                    } else {
                        cfg.fu_ctrl_sel = static_cast<FuCtrlSel>(t.in_port);
                    }
                }
            }
            // Immediate-feedback reductions must leave input A to the register.
            if (cfg.alu_fb_sel) cfg.eb_gate_mask &= ~(1u << GATE_FU_A);
            if (const_val) cfg.constant = *const_val;
        }
        validate_config(cfg);
        out.configs.push_back(std::move(cfg));
    }
    return out;
}

std::vector<Word> emit_image(const PlacedKernel& k) {
    std::vector<Word> words;
    words.reserve(k.configs.size() * 5);
    for (const auto& cfg : k.configs)
        for (Word w : pack_config(cfg)) words.push_back(w);
    return words;
}

std::map<std::string, Word> layout_regions(const std::vector<RegionDecl>& decls,
                                           const ExprEnv& dims, Word config_bytes,
                                           int interleaved_banks) {
    std::map<std::string, Word> base;
    const Word interleaved_start =
        static_cast<Word>(MemoryImage::kBanks - interleaved_banks) * MemoryImage::kBankBytes;
    std::map<std::string, Word> cursor;
    cursor["interleaved"] = interleaved_start;
    for (int b = 0; b < MemoryImage::kBanks - interleaved_banks; ++b)
        cursor["bank" + std::to_string(b)] = static_cast<Word>(b) * MemoryImage::kBankBytes;
    // the configuration blobs sit at the bottom of bank0
    cursor["bank0"] = std::max(cursor["bank0"], (config_bytes + 63) & ~63u);

    for (const auto& r : decls) {
        auto it = cursor.find(r.space);
        if (it == cursor.end())
            throw ParseError("region '" + r.name + "': unknown space '" + r.space + "'");
        Word addr = it->second;
        if (r.phase >= 0) {
            const int want = r.phase % interleaved_banks;
            while (static_cast<int>((addr / 4) % interleaved_banks) != want) addr += 4;
        }
        const int64_t words = eval_expr(r.words, dims);
        if (words < 0) throw ParseError("region '" + r.name + "' has negative size");
        if (base.count(r.name)) throw ParseError("duplicate region '" + r.name + "'");
        base[r.name] = addr;
        it->second = addr + static_cast<Word>(words) * 4;
        const Word limit = r.space == "interleaved"
                               ? MemoryImage::kCapacity
                               : (static_cast<Word>(r.space[4] - '0') + 1) *
                                     MemoryImage::kBankBytes;
        if (it->second > limit)
            throw OutOfBounds("region '" + r.name + "' overflows space " + r.space);
    }
    return base;
}

std::vector<ShotRecord> expand_shots(const KernelManifest& m, const PlacedKernel& k,
                                     const std::map<std::string, Word>& region_base,
                                     Word config_addr, Word config_words) {
    ExprEnv env = m.dims;
    for (const auto& [name, addr] : region_base) env[name] = addr;

    std::vector<ShotRecord> out;
    bool configured = false;
    for (const auto& decl : m.shots) {
        // expand the loop nest row-major, outermost first
        std::vector<int64_t> bounds;
        for (const auto& [var, bexpr] : decl.loops) {
            (void)var;
            int64_t b = eval_expr(bexpr, env);
            if (b < 0) throw DimensionMismatch("loop bound " + bexpr + " is negative");
            bounds.push_back(b);
        }
        int64_t total = 1;
        for (int64_t b : bounds) total *= b;
        for (int64_t it = 0; it < total; ++it) {
            ExprEnv shot_env = env;
            int64_t rest = it;
            for (size_t l = bounds.size(); l-- > 0;) {
                shot_env[decl.loops[l].first] = rest % bounds[l];
                rest /= bounds[l];
            }
            ShotRecord rec;
            rec.in.assign(m.cols, {});
            rec.out.assign(m.cols, {});
            if (decl.reconfigure == "always" ||
                (decl.reconfigure == "first" && !configured)) {
                rec.reconfigure = true;
                rec.config_addr = config_addr;
                rec.config_words = config_words;
                configured = true;
            }
            for (const auto& [node, stream] : decl.streams) {
                StreamDescriptor d;
                d.base = static_cast<Word>(eval_expr(stream.base, shot_env));
                const int64_t size = eval_expr(stream.size, shot_env);
                if (size < 0) throw DimensionMismatch("negative stream size for " + node);
                d.size = static_cast<Word>(size);
                d.stride = static_cast<int32_t>(eval_expr(stream.stride, shot_env));
                auto in_it = k.input_columns.find(node);
                if (in_it != k.input_columns.end()) {
                    rec.in[in_it->second] = d;
                    continue;
                }
                auto out_it = k.output_columns.find(node);
                if (out_it != k.output_columns.end()) {
                    rec.out[out_it->second] = d;
                    continue;
                }
                throw UnboundStream("shot stream for unknown node '" + node + "'");
            }
            out.push_back(std::move(rec));
        }
    }
    return out;
}

} // namespace ecgra
