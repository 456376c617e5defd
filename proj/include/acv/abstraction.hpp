#pragma once

#include <string>
#include <vector>

#include "acv/check.hpp"
#include "acv/ctlk.hpp"
#include "acv/system.hpp"

namespace acv::abs {

// Variable-hiding abstraction: states are projected onto a visible
// proposition subset, per agent; actions collapse into classes with equal
// visible effects, semantically equivalent existentially quantified guards,
// and the same performing agent.
struct AbstractionMap {
    std::vector<int> visible;              // concrete prop ids, ascending
    std::vector<int> pos;                  // concrete prop -> abstract position, -1 if hidden
    kernel::Universe abs_universe;
    std::vector<int> action_class;         // concrete action -> abstract action
    std::vector<std::vector<int>> members; // abstract action -> concrete actions

    logic::BitVec project(const logic::BitVec& s) const { return logic::gather(s, visible); }
    bool is_visible(int prop) const { return pos[static_cast<size_t>(prop)] >= 0; }
    std::vector<int> hidden_props(const kernel::Universe& u) const;

    // Agreement of a full state with an abstract state on the visible bits.
    bool in_preimage(const logic::BitVec& s, const logic::BitVec& abs) const {
        for (size_t i = 0; i < visible.size(); ++i)
            if (s.get(visible[i]) != abs.get(static_cast<int>(i))) return false;
        return true;
    }
};

struct AbstractionOptions {
    int max_guard_support = 20;  // truth-table equivalence bound
};

// Visible set for the first round: the property's atoms plus the atoms used
// to describe the initial states, so the initial region stays expressible.
std::vector<int> initial_visible(const logic::Ctlk& phi, const std::vector<int>& init_atoms);

AbstractionMap make_abstraction(const kernel::System& sys, std::vector<int> visible,
                                const AbstractionOptions& opt = {});

// The induced abstract system: projected initial states, one action per
// class with the visible effect and the existentially quantified guard.
kernel::System abstract_system(const kernel::System& sys, const AbstractionMap& map);

struct SimulationResult {
    bool ok = true;
    int clause = 0;          // violated clause (1..4) when !ok
    std::string detail;
};

// Verifies, over the enumerable reachable parts, that the graph of the
// projection is a simulation: initial-state cover, visible-atom agreement,
// matching of temporal successors, and matching of epistemic neighbours.
SimulationResult simulation_check(const kernel::System& concrete,
                                  const mc::ReachIndex& concrete_reach,
                                  const kernel::System& abstract,
                                  const mc::ReachIndex& abstract_reach,
                                  const AbstractionMap& map);

// One-paragraph summary for logs: visible count, class count, state counts.
std::string abstraction_report(const kernel::System& concrete,
                               const kernel::System& abstract, const AbstractionMap& map,
                               size_t concrete_states, size_t abstract_states);

}  // namespace acv::abs
