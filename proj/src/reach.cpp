#include "acv/reach.hpp"

#include <deque>
#include <map>

#include "acv/error.hpp"

namespace acv::mc {

using logic::BitVec;

ReachIndex reachable(const kernel::System& sys, const ReachOptions& opt) {
    ReachIndex r;
    std::deque<int> frontier;
    auto intern = [&](const BitVec& s) {
        auto it = r.ids.find(s);
        if (it != r.ids.end()) return it->second;
        int id = static_cast<int>(r.states.size());
        if (r.states.size() >= opt.max_states)
            throw CapacityError("reachable state count exceeds the configured bound (" +
                                std::to_string(opt.max_states) + ")");
        r.states.push_back(s);
        r.ids.emplace(s, id);
        r.succs.emplace_back();
        r.preds.emplace_back();
        frontier.push_back(id);
        return id;
    };

    for (const auto& s0 : sys.initial) intern(s0);

    while (!frontier.empty()) {
        int id = frontier.front();
        frontier.pop_front();
        BitVec s = r.states[static_cast<size_t>(id)];
        for (size_t a = 0; a < sys.actions.size(); ++a) {
            auto t = kernel::apply_action(sys.actions[a], s);
            if (!t) continue;
            int tid = intern(*t);
            r.succs[static_cast<size_t>(id)].emplace_back(static_cast<int>(a), tid);
            r.preds[static_cast<size_t>(tid)].emplace_back(static_cast<int>(a), id);
        }
    }

    // Partition by local state, every agent including the environment.
    size_t n_agents = sys.universe.agents.size();
    r.block_of.assign(n_agents, std::vector<int>(r.states.size(), -1));
    r.blocks.assign(n_agents, {});
    for (size_t ag = 0; ag < n_agents; ++ag) {
        std::map<BitVec, int> key;
        for (size_t i = 0; i < r.states.size(); ++i) {
            BitVec loc = sys.universe.local_state(r.states[i], static_cast<int>(ag));
            auto [it, fresh] = key.emplace(loc, static_cast<int>(r.blocks[ag].size()));
            if (fresh) r.blocks[ag].emplace_back();
            r.block_of[ag][i] = it->second;
            r.blocks[ag][static_cast<size_t>(it->second)].push_back(static_cast<int>(i));
        }
    }
    return r;
}

}  // namespace acv::mc
