#pragma once

#include <random>
#include <string>
#include <vector>

#include "acv/ctlk.hpp"
#include "acv/system.hpp"

namespace acv::testing {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

logic::BoolExpr random_bool(Rng& rng, int width, int depth);

// Small interpreted system: an environment and one or two agents sharing at
// most `max_props` propositions, a handful of guarded actions, and one to
// three initial states.
kernel::System random_system(Rng& rng, int max_props = 9, int max_actions = 6);

// Arbitrary CTLK formula over the system's propositions and agents.
logic::Ctlk random_ctlk(Rng& rng, const kernel::System& sys, int depth);

// Universal safety formula (literals, conjunction, disjunction, K over
// propositional operands, AX, AG) over the given atoms.
logic::Ctlk random_safety(Rng& rng, const kernel::System& sys, const std::vector<int>& atoms,
                          int depth);

// Source text of a small policy: two agents, up to three nullary
// predicates, a few action and read rules.
std::string random_micro_policy(Rng& rng);

}  // namespace acv::testing
