#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acv/abstraction.hpp"
#include "acv/counterexample.hpp"

namespace acv::cegar {

// Subset of the concrete preimage of one abstract state. `whole` stands for
// the full preimage, kept symbolic until an explicit set intersects it.
struct RSet {
    bool whole = true;
    kernel::StateSet states;

    bool empty() const { return !whole && states.empty(); }
};

struct CeOptions {
    // When set, the epistemic rules take the union over every shortest
    // temporal witness to the edge target instead of the single stored one.
    bool all_shortest_witnesses = false;
    size_t max_witness_paths = 64;
};

// Accumulated per-path analysis: survivor sets per abstract state, both per
// path and intersected across the paths processed so far.
struct CeCheckResult {
    bool valid = false;
    std::map<logic::BitVec, kernel::StateSet> survivors;  // r per abstract state
    std::string note;                                     // where a forward run died
};

struct FailureDiagnosis {
    logic::BitVec failure_state;    // abstract state whose concretization splits
    kernel::StateSet dead_end;      // concrete states that cannot continue
    kernel::StateSet bad;           // concrete states that can (may be empty)
    bool epistemic_edge = false;
    int edge_agent = -1;
    std::string reason;
    // Base/conflict formula pairs, one per conflicting action or per
    // epistemic case.
    std::vector<std::pair<logic::BoolExpr, logic::BoolExpr>> formulas;
    std::vector<logic::Clause> clauses;   // chosen conflict clauses
    std::vector<int> props_to_add;        // hidden propositions to reveal
};

// One forward step of counterexample validation over a temporal edge: the
// successors of `st` under every concrete action of the class, restricted to
// the preimage of the abstract target.
kernel::StateSet forward_step_temporal(const kernel::System& concrete,
                                       const abs::AbstractionMap& map, int abs_action,
                                       const logic::BitVec& abs_target,
                                       const kernel::StateSet& st);

struct EpistemicStep {
    kernel::StateSet result;
    kernel::StateSet witness_end;  // concrete endpoints of the witness path
    bool witness_spurious = false;
};

// Forward step over an epistemic edge: runs the witness temporal path from
// the initial region, then keeps the endpoints sharing the agent's local
// state with some state of `st`.
EpistemicStep forward_step_epistemic(const kernel::System& concrete,
                                     const abs::AbstractionMap& map, int agent,
                                     const mc::WitnessPath& witness,
                                     const kernel::StateSet& st, const CeOptions& opt = {},
                                     const kernel::System* abstract = nullptr,
                                     const mc::ReachIndex* abs_reach = nullptr);

// Tree-like counterexample validation: processes the paths in order, runs
// the forward rules from the (shrinking) initial survivor set, and computes
// backward survivor sets per vertex, intersecting them across paths. Valid
// exactly when every intersection stays nonempty.
CeCheckResult check_ce(const mc::CeTree& ce, const kernel::System& concrete,
                       const abs::AbstractionMap& map, const CeOptions& opt = {},
                       const kernel::System* abstract = nullptr,
                       const mc::ReachIndex* abs_reach = nullptr);

// Locates the failure state of a spurious counterexample by replaying the
// paths with survivor-intersecting transition rules, and derives the
// base/conflict formulas and conflict clauses for refinement.
FailureDiagnosis find_failure(const mc::CeTree& ce, const kernel::System& concrete,
                              const abs::AbstractionMap& map, const CeOptions& opt = {},
                              const kernel::System* abstract = nullptr,
                              const mc::ReachIndex* abs_reach = nullptr);

// Conjuncts of cnf(conflict) that contradict the base formula, sorted by
// literal count. Truth-table semantics; intended for desk-scale formulas.
std::vector<logic::Clause> conflict_clauses(const logic::BoolExpr& base,
                                            const logic::BoolExpr& conflict,
                                            size_t max_clauses = 10000);

// New visible set: the old one plus the diagnosed propositions. Growth is
// strict; an empty diagnosis escalates to every hidden proposition on which
// the dead-end and bad sets differ.
std::vector<int> refine(const abs::AbstractionMap& map, const kernel::Universe& u,
                        const FailureDiagnosis& diag);

// ── Refinement loop ─────────────────────────────────────────────────────────

struct SelectorContext {
    int agent = -1;
    std::vector<int> candidates;  // hidden local propositions of the agent
    int round = 0;
};
using PropSelector =
    std::function<std::vector<int>(const SelectorContext&, const kernel::System&)>;

struct IterationLog {
    int round = 0;
    size_t visible = 0;
    size_t abstract_states = 0;
    bool abstract_holds = false;
    std::string analysis;  // holds | valid | spurious | selector
    std::string failure_state;
    std::vector<std::string> clauses;
    std::vector<std::string> added;
    std::string ce_text;
};

struct CegarOptions {
    bool interactive = false;
    PropSelector selector;
    std::vector<int> seed_visible;
    CeOptions ce;
    mc::ReachOptions reach;
    size_t max_rounds = 100000;
};

struct CegarOutcome {
    bool holds = false;
    std::optional<mc::CeTree> concrete_ce;
    std::vector<IterationLog> trace;
};

// Abstract-check-refine loop. Automatic mode requires a universally
// quantified safety property; interactive mode additionally admits positive
// ~K over propositional operands and consults the selector whenever the
// abstraction satisfies the property without providing a witness for it.
CegarOutcome cegar_loop(const kernel::System& concrete, const logic::Ctlk& phi,
                        const std::vector<int>& init_atoms, const CegarOptions& opt);

std::string trace_to_json(const std::vector<IterationLog>& trace);

}  // namespace acv::cegar
