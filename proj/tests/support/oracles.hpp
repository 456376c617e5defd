#pragma once

#include <vector>

#include "acv/abstraction.hpp"
#include "acv/counterexample.hpp"
#include "acv/reach.hpp"

namespace acv::testing {

// Plain breadth-first exploration, independent of mc::reachable.
std::vector<logic::BitVec> oracle_reachable(const kernel::System& sys);

// Predecessors by definition, enumerating the full state space:
// { s : post({s}) nonempty and contained in target }.
kernel::StateSet oracle_pre(const kernel::System& sys, int action,
                            const kernel::StateSet& target);

// Recursive satisfaction oracle. Path operators are decided by graph
// searches (cycle detection for EG, reachability for EU) instead of
// fixpoints.
class SatOracle {
public:
    SatOracle(const kernel::System& sys, const mc::ReachIndex& reach)
        : sys_(sys), reach_(reach) {}
    bool sat(const logic::Ctlk& f, int state);

private:
    bool eg_search(const std::vector<uint8_t>& body, int state) const;
    bool eu_search(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b,
                   int state) const;
    std::vector<uint8_t> body_sat(const logic::Ctlk& f);

    const kernel::System& sys_;
    const mc::ReachIndex& reach_;
};

// Endpoints of every concrete path corresponding to an abstract temporal
// path, found by exhaustive enumeration.
kernel::StateSet oracle_path_endpoints(const kernel::System& concrete,
                                       const abs::AbstractionMap& map,
                                       const kernel::StateSet& start,
                                       const std::vector<std::pair<int, logic::BitVec>>& steps);

// Exhaustive search for a concrete counterexample matching the tree: one
// concrete state per abstract state, transitions realized per edge, and
// epistemic targets reached through concrete paths corresponding to the
// stored witness.
bool oracle_concrete_ce_exists(const mc::CeTree& ce, const kernel::System& concrete,
                               const abs::AbstractionMap& map);

}  // namespace acv::testing
