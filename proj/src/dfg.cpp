#include "ecgra/dfg.hpp"

#include <deque>
#include <functional>
#include <set>

namespace ecgra {

const DFGNode* DFG::find(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const DFGNode& DFG::at(const std::string& id) const {
    const DFGNode* n = find(id);
    if (!n) throw ParseError("unknown node '" + id + "'");
    return *n;
}

std::vector<const DFGEdge*> DFG::in_edges(const std::string& id) const {
    std::vector<const DFGEdge*> r;
    for (const auto& e : edges)
        if (e.dst == id) r.push_back(&e);
    return r;
}

std::vector<const DFGEdge*> DFG::out_edges(const std::string& id) const {
    std::vector<const DFGEdge*> r;
    for (const auto& e : edges)
        if (e.src == id) r.push_back(&e);
    return r;
}

namespace {

int port_count(const DFG& dfg, const std::string& id, const std::string& port) {
    int n = 0;
    for (const auto& e : dfg.edges) {
        std::string p = e.dst_port.empty() ? "a" : e.dst_port;
        if (e.dst == id && p == port) ++n;
    }
    return n;
}

} // namespace

std::vector<std::string> validate_dfg(const DFG& dfg) {
    std::vector<std::string> diags;
    std::set<std::string> ids;
    for (const auto& n : dfg.nodes)
        if (!ids.insert(n.id).second) diags.push_back("duplicate node id '" + n.id + "'");

    for (const auto& e : dfg.edges) {
        if (!dfg.find(e.src)) diags.push_back("edge from unknown node '" + e.src + "'");
        if (!dfg.find(e.dst)) diags.push_back("edge to unknown node '" + e.dst + "'");
    }
    if (!diags.empty()) return diags;

    for (const auto& e : dfg.edges) {
        const DFGNode& s = dfg.at(e.src);
        const DFGNode& d = dfg.at(e.dst);
        if (s.kind == NodeKind::Output)
            diags.push_back("output node '" + s.id + "' has an out edge");
        if (d.kind == NodeKind::Input) diags.push_back("input node '" + d.id + "' has an in edge");
        if (d.kind == NodeKind::Const) diags.push_back("const node '" + d.id + "' has an in edge");
        if (s.kind == NodeKind::Branch) {
            if (e.src_port != "t" && e.src_port != "f")
                diags.push_back("edge from branch '" + s.id + "' must name side t or f");
        } else if (!e.src_port.empty()) {
            diags.push_back("node '" + s.id + "' has no output port '" + e.src_port + "'");
        }
        if (e.back && e.dst_port == "ctrl")
            diags.push_back("loop-carried control edge into '" + e.dst +
                            "' (feedback is not allowed for control)");
        if (s.kind == NodeKind::Const && e.dst_port == "ctrl")
            diags.push_back("constant control input on '" + e.dst + "'");
    }

    for (const auto& n : dfg.nodes) {
        const int a = port_count(dfg, n.id, "a");
        const int b = port_count(dfg, n.id, "b");
        const int ctrl = port_count(dfg, n.id, "ctrl");
        auto need = [&](int na, int nb, int nc) {
            if (a != na || b != nb || ctrl != nc)
                diags.push_back("node '" + n.id + "' has inputs a=" + std::to_string(a) +
                                " b=" + std::to_string(b) + " ctrl=" + std::to_string(ctrl));
        };
        switch (n.kind) {
        case NodeKind::Input:
        case NodeKind::Const: need(0, 0, 0); break;
        case NodeKind::Output: need(1, 0, 0); break;
        case NodeKind::Alu:
            if (n.feedback) {
                need(0, 1, 0);
                if (n.delay < 1) diags.push_back("reduction '" + n.id + "' needs delay >= 1");
            } else {
                need(1, 1, 0);
            }
            break;
        case NodeKind::Compare:
            need(1, 1, 0);
            if (n.cmp == CmpOp::Disabled) diags.push_back("compare '" + n.id + "' disabled");
            break;
        case NodeKind::Branch: need(1, 0, 1); break;
        case NodeKind::Merge: need(1, 1, 0); break;
        case NodeKind::Select: need(1, 1, 1); break;
        }
        if (n.kind == NodeKind::Branch) {
            int t = 0, f = 0;
            for (const auto* e : dfg.out_edges(n.id)) {
                t += e->src_port == "t";
                f += e->src_port == "f";
            }
            if (t + f == 0) diags.push_back("branch '" + n.id + "' drives nothing");
        }
        if (n.delay < 0 || n.delay > 255)
            diags.push_back("node '" + n.id + "' delay outside 0..255");
    }

    // Acyclic once loop-carried paths are removed: back edges and the
    // register inside feedback reductions break cycles by construction.
    std::map<std::string, std::vector<std::string>> fwd;
    std::map<std::string, int> indeg;
    for (const auto& n : dfg.nodes) indeg[n.id] = 0;
    for (const auto& e : dfg.edges) {
        if (e.back || dfg.at(e.src).feedback) continue;
        fwd[e.src].push_back(e.dst);
        indeg[e.dst]++;
    }
    std::deque<std::string> q;
    for (auto& [id, d] : indeg)
        if (d == 0) q.push_back(id);
    size_t seen = 0;
    while (!q.empty()) {
        auto id = q.front();
        q.pop_front();
        ++seen;
        for (const auto& d : fwd[id])
            if (--indeg[d] == 0) q.push_back(d);
    }
    if (seen != dfg.nodes.size())
        diags.push_back("combinational cycle: a loop is not broken by a feedback edge");

    return diags;
}

DFG unroll(const DFG& dfg, int k) {
    if (k < 1 || k > 4)
        throw UnrollIllegal("unroll factor " + std::to_string(k) + " outside 1..4");
    if (k == 1) return dfg;
    for (const auto& n : dfg.nodes)
        if (n.feedback || n.init)
            throw UnrollIllegal("node '" + n.id + "' carries cross-iteration state");
    for (const auto& e : dfg.edges)
        if (e.back) throw UnrollIllegal("loop-carried edge " + e.src + "->" + e.dst);
    DFG out;
    for (int i = 0; i < k; ++i) {
        for (DFGNode n : dfg.nodes) {
            n.id += "@" + std::to_string(i);
            out.nodes.push_back(std::move(n));
        }
        for (DFGEdge e : dfg.edges) {
            e.src += "@" + std::to_string(i);
            e.dst += "@" + std::to_string(i);
            out.edges.push_back(std::move(e));
        }
    }
    return out;
}

InterpreterResult interpret_dfg(const DFG& dfg,
                                const std::map<std::string, std::vector<Word>>& inputs,
                                size_t max_steps) {
    auto diags = validate_dfg(dfg);
    if (!diags.empty()) throw ParseError("invalid dfg: " + diags.front());

    // One token queue per non-const edge; constants are bottomless.
    std::map<const DFGEdge*, std::deque<Word>> q;
    for (const auto& e : dfg.edges) q[&e];

    auto push_all = [&](const std::string& id, const std::string& port, Word v) {
        for (const auto& e : dfg.edges)
            if (e.src == id && e.src_port == port) q[&e].push_back(v);
    };

    // Bootstrap tokens: initial register values that start a flow.
    for (const auto& n : dfg.nodes)
        if (n.init && !n.feedback) push_all(n.id, "", *n.init);

    std::map<std::string, size_t> input_pos;
    std::map<std::string, Word> acc; // feedback reductions
    std::map<std::string, int> acc_count;
    for (const auto& n : dfg.nodes)
        if (n.feedback) acc[n.id] = n.init.value_or(0);

    InterpreterResult result;

    auto edge_for = [&](const std::string& id, const std::string& port) -> const DFGEdge* {
        for (const auto& e : dfg.edges) {
            std::string p = e.dst_port.empty() ? "a" : e.dst_port;
            if (e.dst == id && p == port) return &e;
        }
        return nullptr;
    };
    auto has = [&](const DFGEdge* e) {
        return e && (dfg.at(e->src).kind == NodeKind::Const || !q[e].empty());
    };
    auto pop = [&](const DFGEdge* e) -> Word {
        const DFGNode& s = dfg.at(e->src);
        if (s.kind == NodeKind::Const) return s.value;
        Word v = q[e].front();
        q[e].pop_front();
        return v;
    };

    size_t steps = 0;
    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (const auto& n : dfg.nodes) {
            if (++steps > max_steps) throw Error("dfg interpreter exceeded its step budget");
            switch (n.kind) {
            case NodeKind::Const: break;
            case NodeKind::Input: {
                auto it = inputs.find(n.id);
                size_t& pos = input_pos[n.id];
                if (it != inputs.end() && pos < it->second.size()) {
                    push_all(n.id, "", it->second[pos++]);
                    progressed = true;
                }
                break;
            }
            case NodeKind::Output: {
                const DFGEdge* e = edge_for(n.id, "a");
                while (e && !q[e].empty()) {
                    result.outputs[n.id].push_back(pop(e));
                    progressed = true;
                }
                break;
            }
            case NodeKind::Alu: {
                if (n.feedback) {
                    const DFGEdge* b = edge_for(n.id, "b");
                    while (has(b)) {
                        acc[n.id] = alu_eval(n.op, acc[n.id], pop(b));
                        if (++acc_count[n.id] == n.delay) {
                            push_all(n.id, "", acc[n.id]);
                            acc[n.id] = n.init.value_or(0);
                            acc_count[n.id] = 0;
                        }
                        progressed = true;
                        if (dfg.at(b->src).kind == NodeKind::Const) break; // bottomless
                    }
                    break;
                }
                const DFGEdge* a = edge_for(n.id, "a");
                const DFGEdge* b = edge_for(n.id, "b");
                while (has(a) && has(b)) {
                    Word av = pop(a);
                    Word bv = pop(b);
                    push_all(n.id, "", alu_eval(n.op, av, bv));
                    progressed = true;
                    if (dfg.at(a->src).kind == NodeKind::Const &&
                        dfg.at(b->src).kind == NodeKind::Const)
                        break;
                }
                break;
            }
            case NodeKind::Compare: {
                const DFGEdge* a = edge_for(n.id, "a");
                const DFGEdge* b = edge_for(n.id, "b");
                while (has(a) && has(b)) {
                    Word av = pop(a);
                    Word bv = pop(b);
                    push_all(n.id, "", cmp_eval(n.cmp, av, bv) ? 1 : 0);
                    progressed = true;
                    if (dfg.at(a->src).kind == NodeKind::Const &&
                        dfg.at(b->src).kind == NodeKind::Const)
                        break;
                }
                break;
            }
            case NodeKind::Select: {
                const DFGEdge* a = edge_for(n.id, "a");
                const DFGEdge* b = edge_for(n.id, "b");
                const DFGEdge* c = edge_for(n.id, "ctrl");
                while (has(a) && has(b) && has(c)) {
                    Word av = pop(a);
                    Word bv = pop(b);
                    Word cv = pop(c);
                    push_all(n.id, "", cv != 0 ? av : bv);
                    progressed = true;
                }
                break;
            }
            case NodeKind::Branch: {
                const DFGEdge* a = edge_for(n.id, "a");
                const DFGEdge* c = edge_for(n.id, "ctrl");
                while (has(a) && has(c)) {
                    Word av = pop(a);
                    Word cv = pop(c);
                    push_all(n.id, cv != 0 ? "t" : "f", av);
                    progressed = true;
                }
                break;
            }
            case NodeKind::Merge: {
                const DFGEdge* a = edge_for(n.id, "a");
                const DFGEdge* b = edge_for(n.id, "b");
                while ((a && !q[a].empty()) || (b && !q[b].empty())) {
                    // collision rule: side A first
                    push_all(n.id, "", (a && !q[a].empty()) ? pop(a) : pop(b));
                    progressed = true;
                }
                break;
            }
            }
        }
    }
    return result;
}

} // namespace ecgra
