#include "acv/abstraction.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "acv/error.hpp"

namespace acv::abs {

using logic::BitVec;
using logic::BoolExpr;

std::vector<int> AbstractionMap::hidden_props(const kernel::Universe& u) const {
    std::vector<int> out;
    for (int p = 0; p < u.width(); ++p)
        if (!is_visible(p)) out.push_back(p);
    return out;
}

std::vector<int> initial_visible(const logic::Ctlk& phi, const std::vector<int>& init_atoms) {
    std::set<int> v(init_atoms.begin(), init_atoms.end());
    phi.collect_atoms(v);
    return {v.begin(), v.end()};
}

namespace {

// Canonical form of a guard after hiding: its truth table over its own
// support with don't-care variables removed. Two guards are semantically
// equivalent iff their canonical forms coincide.
struct GuardKey {
    std::vector<int> vars;
    std::vector<bool> table;
    bool operator<(const GuardKey& o) const {
        if (vars != o.vars) return vars < o.vars;
        return table < o.table;
    }
};

GuardKey canonical_guard(const BoolExpr& g, int max_support) {
    std::vector<int> support = g.vars();
    if (static_cast<int>(support.size()) > max_support)
        throw CapacityError("guard support exceeds the truth-table bound (" +
                            std::to_string(max_support) + " propositions)");
    std::vector<bool> table = logic::truth_table(g, support);
    // Strip variables the function does not depend on.
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t j = 0; j < support.size(); ++j) {
            size_t stride = size_t{1} << j;
            bool care = false;
            for (size_t i = 0; i < table.size() && !care; ++i)
                if ((i & stride) == 0 && table[i] != table[i | stride]) care = true;
            if (care) continue;
            std::vector<bool> shrunk;
            shrunk.reserve(table.size() / 2);
            for (size_t i = 0; i < table.size(); ++i)
                if ((i & stride) == 0) shrunk.push_back(table[i]);
            table = std::move(shrunk);
            support.erase(support.begin() + static_cast<long>(j));
            changed = true;
            break;
        }
    }
    return {std::move(support), std::move(table)};
}

}  // namespace

AbstractionMap make_abstraction(const kernel::System& sys, std::vector<int> visible,
                                const AbstractionOptions& opt) {
    const kernel::Universe& u = sys.universe;
    std::sort(visible.begin(), visible.end());
    visible.erase(std::unique(visible.begin(), visible.end()), visible.end());
    for (int p : visible)
        if (p < 0 || p >= u.width()) throw Error("visible proposition out of range");

    AbstractionMap map;
    map.visible = visible;
    map.pos.assign(static_cast<size_t>(u.width()), -1);
    for (size_t i = 0; i < visible.size(); ++i)
        map.pos[static_cast<size_t>(visible[i])] = static_cast<int>(i);

    // Universe of the abstract system: the visible propositions keep their
    // names, owners and grouping; spans are recomputed over the projection.
    map.abs_universe.agents = u.agents;
    for (int p : visible) map.abs_universe.props.push_back(u.props[static_cast<size_t>(p)]);
    for (size_t ag = 0; ag < u.agents.size(); ++ag) {
        auto [b, e] = u.span[ag];
        int lo = 0, hi = 0;
        bool seen = false;
        for (size_t i = 0; i < visible.size(); ++i) {
            if (visible[i] >= b && visible[i] < e) {
                if (!seen) lo = static_cast<int>(i);
                hi = static_cast<int>(i) + 1;
                seen = true;
            }
        }
        map.abs_universe.span.emplace_back(seen ? lo : 0, seen ? hi : 0);
    }

    std::set<int> hidden;
    for (int p = 0; p < u.width(); ++p)
        if (!map.is_visible(p)) hidden.insert(p);

    // Classification key: performing agent, visible effect, canonical
    // quantified guard.
    struct Key {
        int agent;
        std::vector<std::pair<int, bool>> effect;
        GuardKey guard;
        bool operator<(const Key& o) const {
            if (agent != o.agent) return agent < o.agent;
            if (effect != o.effect) return effect < o.effect;
            return guard < o.guard;
        }
    };
    std::map<Key, int> classes;
    map.action_class.assign(sys.actions.size(), -1);
    for (size_t a = 0; a < sys.actions.size(); ++a) {
        const kernel::Action& act = sys.actions[a];
        Key k;
        k.agent = act.agent;
        for (const auto& [p, sgn] : act.effect)
            if (map.is_visible(p)) k.effect.emplace_back(p, sgn);
        k.guard = canonical_guard(logic::exists_quantify(act.guard, hidden),
                                  opt.max_guard_support);
        auto it = classes.find(k);
        if (it == classes.end()) {
            int id = static_cast<int>(map.members.size());
            classes.emplace(std::move(k), id);
            map.members.emplace_back();
            map.members.back().push_back(static_cast<int>(a));
            map.action_class[a] = id;
        } else {
            map.action_class[a] = it->second;
            map.members[static_cast<size_t>(it->second)].push_back(static_cast<int>(a));
        }
    }
    return map;
}

kernel::System abstract_system(const kernel::System& sys, const AbstractionMap& map) {
    kernel::System abs;
    abs.universe = map.abs_universe;

    std::set<int> hidden;
    for (int p = 0; p < sys.universe.width(); ++p)
        if (!map.is_visible(p)) hidden.insert(p);

    for (const auto& members : map.members) {
        const kernel::Action& rep = sys.actions[static_cast<size_t>(members.front())];
        kernel::Action a;
        a.id = "[" + rep.id + "]";
        a.agent = rep.agent;
        for (const auto& [p, sgn] : rep.effect)
            if (map.is_visible(p))
                a.effect.emplace_back(map.pos[static_cast<size_t>(p)], sgn);
        a.guard = logic::exists_quantify(rep.guard, hidden).rename([&](int v) {
            return map.pos[static_cast<size_t>(v)];
        });
        abs.actions.push_back(std::move(a));
    }

    std::set<BitVec> inits;
    for (const auto& s0 : sys.initial) inits.insert(map.project(s0));
    abs.initial.assign(inits.begin(), inits.end());
    abs.initial_unsat = sys.initial_unsat;
    return abs;
}

SimulationResult simulation_check(const kernel::System& concrete,
                                  const mc::ReachIndex& concrete_reach,
                                  const kernel::System& abstract,
                                  const mc::ReachIndex& abstract_reach,
                                  const AbstractionMap& map) {
    SimulationResult r;
    std::set<BitVec> abs_init(abstract.initial.begin(), abstract.initial.end());

    // 1: every concrete initial state is covered by an abstract one.
    for (const auto& s0 : concrete.initial) {
        if (!abs_init.count(map.project(s0))) {
            r.ok = false;
            r.clause = 1;
            r.detail = "initial state " + s0.to_string() + " is not covered";
            return r;
        }
    }

    for (size_t i = 0; i < concrete_reach.size(); ++i) {
        const BitVec& s = concrete_reach.states[i];
        BitVec hs = map.project(s);

        // 2: visible atoms agree between s and h(s).
        for (size_t k = 0; k < map.visible.size(); ++k) {
            if (s.get(map.visible[k]) != hs.get(static_cast<int>(k))) {
                r.ok = false;
                r.clause = 2;
                r.detail = "visible atom disagreement at " + s.to_string();
                return r;
            }
        }

        // 4 (epistemic matching): h maps reachable states to reachable
        // states, and projections of equal local states are equal, so the
        // image of every epistemic neighbour is an abstract neighbour.
        if (abstract_reach.id_of(hs) < 0) {
            r.ok = false;
            r.clause = 4;
            r.detail = "image " + hs.to_string() + " of reachable " + s.to_string() +
                       " is not abstractly reachable";
            return r;
        }

        // 3: every concrete transition has an abstract counterpart.
        for (const auto& [act, to] : concrete_reach.succs[i]) {
            const BitVec& t = concrete_reach.states[static_cast<size_t>(to)];
            BitVec ht = map.project(t);
            bool matched = false;
            int cls = map.action_class[static_cast<size_t>(act)];
            if (auto img = kernel::apply_action(abstract.actions[static_cast<size_t>(cls)], hs);
                img && *img == ht)
                matched = true;
            for (size_t b = 0; b < abstract.actions.size() && !matched; ++b) {
                if (auto img = kernel::apply_action(abstract.actions[b], hs); img && *img == ht)
                    matched = true;
            }
            if (!matched) {
                r.ok = false;
                r.clause = 3;
                r.detail = "transition " + s.to_string() + " -[" +
                           concrete.actions[static_cast<size_t>(act)].id + "]-> " +
                           t.to_string() + " has no abstract counterpart";
                return r;
            }
        }
    }
    return r;
}

std::string abstraction_report(const kernel::System& concrete,
                               const kernel::System& abstract, const AbstractionMap& map,
                               size_t concrete_states, size_t abstract_states) {
    std::ostringstream os;
    os << "visible " << map.visible.size() << "/" << concrete.universe.width()
       << " propositions; " << abstract.actions.size() << " action classes from "
       << concrete.actions.size() << " actions; states " << concrete_states << " -> "
       << abstract_states;
    return os.str();
}

}  // namespace acv::abs
