#pragma once

#include <string>
#include <vector>

#include "acv/bitvec.hpp"
#include "acv/policy_ast.hpp"

namespace acv::kernel {

enum class PropKind { Policy, Loc, Read };

struct PropInfo {
    std::string name;
    int owner = 0;        // agent index; 0 is the environment
    PropKind kind = PropKind::Policy;
    int base = -1;        // policy proposition a Loc/Read bit tracks
};

// The full proposition set: environment propositions first, then one
// contiguous block per agent. An agent's block holds, for every policy
// proposition p, a local copy bit and a read permission bit; the blocks are
// pairwise disjoint by construction.
struct Universe {
    std::vector<std::string> agents;          // [0] == "e"
    std::vector<PropInfo> props;
    std::vector<std::pair<int, int>> span;    // per agent: [begin, end) into props

    int width() const { return static_cast<int>(props.size()); }
    int policy_count() const { return span.empty() ? 0 : span[0].second; }

    // Valid for agent >= 1 in a policy-derived universe.
    int loc_index(int agent, int policy_prop) const {
        return span[static_cast<size_t>(agent)].first + 2 * policy_prop;
    }
    int read_index(int agent, int policy_prop) const {
        return span[static_cast<size_t>(agent)].first + 2 * policy_prop + 1;
    }

    int find_prop(const std::string& name) const {
        for (size_t i = 0; i < props.size(); ++i)
            if (props[i].name == name) return static_cast<int>(i);
        return -1;
    }
    int find_agent(const std::string& name) const {
        for (size_t i = 0; i < agents.size(); ++i)
            if (agents[i] == name) return static_cast<int>(i);
        return -1;
    }

    // True when every agent block has the loc/read pair layout produced by
    // policy derivation.
    bool has_local_bits() const {
        if (span.empty()) return false;
        for (size_t a = 1; a < span.size(); ++a)
            if (span[a].second - span[a].first != 2 * policy_count()) return false;
        return agents.size() > 1;
    }

    std::vector<int> agent_props(int agent) const {
        std::vector<int> out;
        auto [b, e] = span[static_cast<size_t>(agent)];
        for (int i = b; i < e; ++i) out.push_back(i);
        return out;
    }

    logic::BitVec local_state(const logic::BitVec& s, int agent) const {
        auto [b, e] = span[static_cast<size_t>(agent)];
        logic::BitVec r(e - b);
        for (int i = b; i < e; ++i) r.set(i - b, s.get(i));
        return r;
    }
};

// Universe induced by a grounded policy: policy propositions become the
// environment block; every agent gets loc/read bits for each of them.
Universe make_universe(const policy::Policy& pol);

}  // namespace acv::kernel
