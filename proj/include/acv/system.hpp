#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acv/boolexpr.hpp"
#include "acv/universe.hpp"

namespace acv::kernel {

// A guarded deterministic update. Joint actions are asynchronous: each
// transition is this single non-noop action, all other agents idle.
struct Action {
    std::string id;
    int agent = 0;                              // performing agent (0 = environment)
    std::vector<std::pair<int, bool>> effect;   // (prop, sign), sorted by prop
    logic::BoolExpr guard;                      // over environment propositions
};

// A joint action named by its only non-noop element; empty means every agent
// performs the no-operation.
struct JointAction {
    std::optional<int> action;  // index into System::actions
    bool is_noop() const { return !action.has_value(); }
};

using StateSet = std::set<logic::BitVec>;

struct System {
    Universe universe;
    std::vector<Action> actions;
    std::vector<logic::BitVec> initial;  // sorted, unique
    bool initial_unsat = false;          // initial constraint had no model

    int width() const { return universe.width(); }
};

// Applies the action to a single state; empty when the guard fails.
std::optional<logic::BitVec> apply_action(const Action& a, const logic::BitVec& s);

// Image of a state set under one action: states satisfying the guard are
// updated by the effect, the rest contribute nothing.
StateSet post_image(const System& sys, int action, const StateSet& states);

// Preimage: all states (over the full space, not just reachable ones) that
// satisfy the guard and whose update lands in `states`. Implemented by
// freeing only the effect bits of each target, so the full space is never
// enumerated.
StateSet pre_image(const System& sys, int action, const StateSet& states);

}  // namespace acv::kernel

namespace acv::mc {
struct ReachIndex;
}

namespace acv::kernel {

// Line-oriented description of the system (propositions, actions, initial
// states, reachable transitions) for diffing in tests. Stable ordering.
std::string dump_system(const System& sys, const mc::ReachIndex& reach);

}  // namespace acv::kernel
