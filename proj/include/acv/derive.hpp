#pragma once

#include <vector>

#include "acv/policy_ast.hpp"
#include "acv/system.hpp"

namespace acv::kernel {

struct DeriveOptions {
    size_t max_actions = 1000000;   // cap on the woven action set
    size_t max_initial = 10000000;  // cap on enumerated initial states
};

// Read guard for (agent, policy prop): the disjunction of the guards of every
// matching read permission, or false when none exists (deny by default).
logic::BoolExpr read_guard(const policy::Policy& pol, int agent, int prop);

// Rewrites the ground actions so that every agent's local copy and read
// permission bits track the policy propositions: whenever an action makes a
// proposition readable for an agent in the successor state, the local copy is
// set to the proposition's new value; when readability is lost, only the
// permission bit is cleared. Actions whose split guard folds to false are
// dropped on the spot.
struct WovenActions {
    Universe universe;
    std::vector<Action> actions;
};
WovenActions incorporate_read_permissions(const policy::Policy& pol,
                                          const DeriveOptions& opt = {});

// Initial states: all valuations satisfying `init` in which, additionally,
// every read bit equals its read guard evaluated at the policy valuation and
// every granted read forces the local copy to agree with its proposition.
// Unconstrained local copies of unreadable propositions remain free.
std::vector<logic::BitVec> build_initial_states(const Universe& u,
                                                const policy::Policy& pol,
                                                const logic::BoolExpr& init,
                                                const DeriveOptions& opt = {});

// Full pipeline from a grounded policy and an initial-state constraint.
System derive_system(const policy::Policy& pol, const logic::BoolExpr& init,
                     const DeriveOptions& opt = {});

}  // namespace acv::kernel
