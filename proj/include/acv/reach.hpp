#pragma once

#include <unordered_map>
#include <vector>

#include "acv/system.hpp"

namespace acv::mc {

struct ReachOptions {
    size_t max_states = 10000000;
};

// Reachable fragment of a system: states in discovery (BFS) order, the
// labelled successor/predecessor relation, and for every agent the partition
// of the reachable states by local state. Two reachable states are
// epistemically indistinguishable for an agent exactly when they sit in the
// same block of that agent's partition.
struct ReachIndex {
    std::vector<logic::BitVec> states;
    std::unordered_map<logic::BitVec, int, logic::BitVecHash> ids;
    std::vector<std::vector<std::pair<int, int>>> succs;  // per state: (action, to)
    std::vector<std::vector<std::pair<int, int>>> preds;  // per state: (action, from)
    std::vector<std::vector<int>> block_of;               // per agent: state -> block
    std::vector<std::vector<std::vector<int>>> blocks;    // per agent: block -> states

    int id_of(const logic::BitVec& s) const {
        auto it = ids.find(s);
        return it == ids.end() ? -1 : it->second;
    }
    size_t size() const { return states.size(); }
};

ReachIndex reachable(const kernel::System& sys, const ReachOptions& opt = {});

}  // namespace acv::mc
