#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acv/check.hpp"

namespace acv::mc {

// A temporal path from an initial state, attached to an epistemic edge as
// the reachability witness of the edge's target.
struct WitnessPath {
    logic::BitVec start;
    std::vector<std::pair<int, logic::BitVec>> steps;  // (action, next state)

    logic::BitVec end() const { return steps.empty() ? start : steps.back().second; }
};

struct CeEdge {
    int from = -1;
    int to = -1;
    bool epistemic = false;
    int action = -1;   // temporal edges
    int agent = -1;    // epistemic edges
    WitnessPath witness;
};

// Loop-free tree rooted at an initial state. Temporal edges carry the action
// performed; epistemic edges carry the agent and a reachability witness for
// their target. The formal reading is the set of root-to-leaf paths.
struct CeTree {
    std::vector<logic::BitVec> vertices;
    int root = 0;
    std::vector<CeEdge> edges;  // parent -> child, in creation order

    std::vector<std::vector<int>> out;  // vertex -> outgoing edge indices

    int add_vertex(const logic::BitVec& s);
    int add_edge(CeEdge e);

    // Each path is the edge-index sequence of one root-to-leaf branch; a
    // single-vertex tree has one empty path.
    std::vector<std::vector<int>> paths() const;
};

// Extracts a tree-like counterexample for a violated formula in the
// supported safety fragment (AG/AX, propositional connectives, K over
// propositional operands, and positive ~K whose truth needs no witness).
// Returns nullopt when the formula holds. Witness paths are shortest, with
// ties broken by action order; the root is the first violating initial state
// in canonical order.
std::optional<CeTree> counterexample(Evaluator& ev, const logic::Ctlk& f);

// Deterministic renderings for logs and golden tests.
std::string ce_to_text(const CeTree& ce, const kernel::System& sys);
std::string ce_to_json(const CeTree& ce, const kernel::System& sys);

}  // namespace acv::mc
