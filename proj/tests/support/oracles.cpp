#include "support/oracles.hpp"

#include <deque>
#include <functional>
#include <map>
#include <set>

namespace acv::testing {

using kernel::StateSet;
using logic::BitVec;
using logic::Ctlk;
using logic::CtlkOp;

std::vector<BitVec> oracle_reachable(const kernel::System& sys) {
    std::set<BitVec> seen(sys.initial.begin(), sys.initial.end());
    std::deque<BitVec> q(sys.initial.begin(), sys.initial.end());
    while (!q.empty()) {
        BitVec s = q.front();
        q.pop_front();
        for (const auto& a : sys.actions) {
            auto t = kernel::apply_action(a, s);
            if (t && seen.insert(*t).second) q.push_back(*t);
        }
    }
    return {seen.begin(), seen.end()};
}

kernel::StateSet oracle_pre(const kernel::System& sys, int action, const StateSet& target) {
    StateSet out;
    int w = sys.width();
    for (uint64_t bits = 0; bits < (uint64_t{1} << w); ++bits) {
        BitVec s(w);
        for (int p = 0; p < w; ++p) s.set(p, (bits >> p) & 1);
        auto t = kernel::apply_action(sys.actions[static_cast<size_t>(action)], s);
        if (t && target.count(*t)) out.insert(s);
    }
    return out;
}

std::vector<uint8_t> SatOracle::body_sat(const Ctlk& f) {
    std::vector<uint8_t> r(reach_.size());
    for (size_t i = 0; i < r.size(); ++i) r[i] = sat(f, static_cast<int>(i));
    return r;
}

bool SatOracle::eg_search(const std::vector<uint8_t>& body, int state) const {
    // An infinite path inside the body exists iff a cycle of body states is
    // reachable from `state` through body states.
    if (!body[static_cast<size_t>(state)]) return false;
    std::vector<int> color(reach_.size(), 0);  // 0 new, 1 on stack, 2 done
    std::function<bool(int)> dfs = [&](int s) -> bool {
        color[static_cast<size_t>(s)] = 1;
        for (const auto& [act, to] : reach_.succs[static_cast<size_t>(s)]) {
            if (!body[static_cast<size_t>(to)]) continue;
            if (color[static_cast<size_t>(to)] == 1) return true;
            if (color[static_cast<size_t>(to)] == 0 && dfs(to)) return true;
        }
        color[static_cast<size_t>(s)] = 2;
        return false;
    };
    return dfs(state);
}

bool SatOracle::eu_search(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b,
                          int state) const {
    if (b[static_cast<size_t>(state)]) return true;
    if (!a[static_cast<size_t>(state)]) return false;
    std::set<int> seen{state};
    std::deque<int> q{state};
    while (!q.empty()) {
        int s = q.front();
        q.pop_front();
        for (const auto& [act, to] : reach_.succs[static_cast<size_t>(s)]) {
            if (b[static_cast<size_t>(to)]) return true;
            if (!a[static_cast<size_t>(to)]) continue;
            if (seen.insert(to).second) q.push_back(to);
        }
    }
    return false;
}

bool SatOracle::sat(const Ctlk& f, int state) {
    switch (f.op()) {
        case CtlkOp::True: return true;
        case CtlkOp::False: return false;
        case CtlkOp::Atom:
            return reach_.states[static_cast<size_t>(state)].get(f.prop());
        case CtlkOp::Not: return !sat(f.kids()[0], state);
        case CtlkOp::And: return sat(f.kids()[0], state) && sat(f.kids()[1], state);
        case CtlkOp::Or: return sat(f.kids()[0], state) || sat(f.kids()[1], state);
        case CtlkOp::Implies: return !sat(f.kids()[0], state) || sat(f.kids()[1], state);
        case CtlkOp::K: {
            BitVec mine =
                sys_.universe.local_state(reach_.states[static_cast<size_t>(state)], f.agent());
            for (size_t t = 0; t < reach_.size(); ++t) {
                if (!(sys_.universe.local_state(reach_.states[t], f.agent()) == mine))
                    continue;
                if (!sat(f.kids()[0], static_cast<int>(t))) return false;
            }
            return true;
        }
        case CtlkOp::EX: {
            for (const auto& [act, to] : reach_.succs[static_cast<size_t>(state)])
                if (sat(f.kids()[0], to)) return true;
            return false;
        }
        case CtlkOp::AX: {
            for (const auto& [act, to] : reach_.succs[static_cast<size_t>(state)])
                if (!sat(f.kids()[0], to)) return false;
            return true;
        }
        case CtlkOp::EG: return eg_search(body_sat(f.kids()[0]), state);
        case CtlkOp::AF: return !eg_search(body_sat(Ctlk::negate(f.kids()[0])), state);
        case CtlkOp::EU:
            return eu_search(body_sat(f.kids()[0]), body_sat(f.kids()[1]), state);
        case CtlkOp::EF: {
            std::vector<uint8_t> all(reach_.size(), 1);
            return eu_search(all, body_sat(f.kids()[0]), state);
        }
        case CtlkOp::AG: {
            std::vector<uint8_t> all(reach_.size(), 1);
            return !eu_search(all, body_sat(Ctlk::negate(f.kids()[0])), state);
        }
        case CtlkOp::AU: {
            // ~(E(~b U (~a & ~b)) | EG ~b)
            auto na = body_sat(Ctlk::negate(f.kids()[0]));
            auto nb = body_sat(Ctlk::negate(f.kids()[1]));
            std::vector<uint8_t> both(reach_.size());
            for (size_t i = 0; i < both.size(); ++i) both[i] = na[i] && nb[i];
            return !(eu_search(nb, both, state) || eg_search(nb, state));
        }
        case CtlkOp::AR: {
            auto na = body_sat(Ctlk::negate(f.kids()[0]));
            auto nb = body_sat(Ctlk::negate(f.kids()[1]));
            return !eu_search(na, nb, state);
        }
    }
    return false;
}

kernel::StateSet oracle_path_endpoints(const kernel::System& concrete,
                                       const abs::AbstractionMap& map, const StateSet& start,
                                       const std::vector<std::pair<int, BitVec>>& steps) {
    StateSet layer = start;
    for (const auto& [abs_act, abs_to] : steps) {
        StateSet next;
        for (int a : map.members[static_cast<size_t>(abs_act)])
            for (const auto& s : layer) {
                auto t = kernel::apply_action(concrete.actions[static_cast<size_t>(a)], s);
                if (t && map.in_preimage(*t, abs_to)) next.insert(*t);
            }
        layer = std::move(next);
        if (layer.empty()) break;
    }
    return layer;
}

bool oracle_concrete_ce_exists(const mc::CeTree& ce, const kernel::System& concrete,
                               const abs::AbstractionMap& map) {
    int w = concrete.width();
    if (w > 20) return false;  // oracle is for exhaustive scales only

    // Full preimage of each distinct abstract vertex state.
    std::vector<BitVec> order;
    std::set<BitVec> seen;
    auto add = [&](const BitVec& v) {
        if (seen.insert(v).second) order.push_back(v);
    };
    add(ce.vertices[static_cast<size_t>(ce.root)]);
    for (const auto& e : ce.edges) {
        add(ce.vertices[static_cast<size_t>(e.from)]);
        add(ce.vertices[static_cast<size_t>(e.to)]);
    }

    std::map<BitVec, std::vector<BitVec>> domain;
    for (uint64_t bits = 0; bits < (uint64_t{1} << w); ++bits) {
        BitVec s(w);
        for (int p = 0; p < w; ++p) s.set(p, (bits >> p) & 1);
        for (const auto& v : order)
            if (map.in_preimage(s, v)) domain[v].push_back(s);
    }
    // The root must be initial.
    {
        std::vector<BitVec> roots;
        const BitVec& rv = ce.vertices[static_cast<size_t>(ce.root)];
        for (const auto& s0 : concrete.initial)
            if (map.in_preimage(s0, rv)) roots.push_back(s0);
        domain[rv] = std::move(roots);
    }

    std::map<const mc::CeEdge*, StateSet> wit_end;
    for (const auto& e : ce.edges) {
        if (!e.epistemic) continue;
        StateSet start;
        for (const auto& s0 : concrete.initial)
            if (map.in_preimage(s0, e.witness.start)) start.insert(s0);
        wit_end[&e] = oracle_path_endpoints(concrete, map, start, e.witness.steps);
    }

    std::map<BitVec, BitVec> pick;
    auto edge_ok = [&](const mc::CeEdge& e) {
        const BitVec& fv = ce.vertices[static_cast<size_t>(e.from)];
        const BitVec& tv = ce.vertices[static_cast<size_t>(e.to)];
        auto fi = pick.find(fv), ti = pick.find(tv);
        if (fi == pick.end() || ti == pick.end()) return true;
        if (!e.epistemic) {
            for (int a : map.members[static_cast<size_t>(e.action)]) {
                auto img =
                    kernel::apply_action(concrete.actions[static_cast<size_t>(a)], fi->second);
                if (img && *img == ti->second) return true;
            }
            return false;
        }
        if (!(concrete.universe.local_state(fi->second, e.agent) ==
              concrete.universe.local_state(ti->second, e.agent)))
            return false;
        return wit_end[&e].count(ti->second) > 0;
    };

    std::function<bool(size_t)> assign = [&](size_t i) -> bool {
        if (i == order.size()) return true;
        for (const auto& cand : domain[order[i]]) {
            pick[order[i]] = cand;
            bool ok = true;
            for (const auto& e : ce.edges)
                if (!edge_ok(e)) {
                    ok = false;
                    break;
                }
            if (ok && assign(i + 1)) return true;
            pick.erase(order[i]);
        }
        return false;
    };
    return assign(0);
}

}  // namespace acv::testing
