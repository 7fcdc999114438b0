#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecgra/pe_config.hpp"

namespace ecgra {

enum class NodeKind : uint8_t { Input, Output, Const, Alu, Compare, Branch, Merge, Select };

/// One dataflow node. Ports: Alu/Compare/Merge take a,b; Select a,b,ctrl;
/// Branch a,ctrl with outputs t (ctrl!=0) and f; Output takes a.
struct DFGNode {
    std::string id;
    NodeKind kind = NodeKind::Alu;
    AluOp op = AluOp::Add;
    CmpOp cmp = CmpOp::GtZero;
    bool feedback = false; // immediate-feedback reduction (operand A = register)
    int delay = 0;         // delayed-valid period; reductions emit every delay-th firing
    Word value = 0;        // Const only
    std::optional<Word> init; // bootstrap token (reduction seed for feedback nodes)
};

struct DFGEdge {
    std::string src;
    std::string src_port; // "" plain | "t"/"f" branch sides
    std::string dst;
    std::string dst_port; // "a","b","ctrl"; "" means "a"
    bool back = false;    // loop-carried edge; breaks the acyclicity check
};

struct DFG {
    std::vector<DFGNode> nodes;
    std::vector<DFGEdge> edges;

    const DFGNode* find(const std::string& id) const;
    const DFGNode& at(const std::string& id) const;
    std::vector<const DFGEdge*> in_edges(const std::string& id) const;
    std::vector<const DFGEdge*> out_edges(const std::string& id) const;
};

/// Structural diagnostics: arity per node kind, const usage, feedback
/// legality (control edges may not be loop-carried), acyclicity once back
/// edges and register-carried paths are removed. Empty result = legal graph.
std::vector<std::string> validate_dfg(const DFG& dfg);

/// k disjoint renamed copies (id -> id@i). Rejects stateful graphs (feedback
/// reductions, loop-carried edges, bootstrap state) and k outside 1..4.
DFG unroll(const DFG& dfg, int k);

/// Denotational evaluation: token queues per edge, nodes fire when their
/// inputs are available. The oracle for routed-design soundness. Merge pops
/// A first when both sides hold tokens (the fabric's collision rule), but
/// confluent graphs do not depend on this.
struct InterpreterResult {
    std::map<std::string, std::vector<Word>> outputs; // per Output node
};

InterpreterResult interpret_dfg(const DFG& dfg,
                                const std::map<std::string, std::vector<Word>>& inputs,
                                size_t max_steps = 1u << 22);

} // namespace ecgra
