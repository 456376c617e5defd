#include "acv/derive.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "acv/error.hpp"

namespace acv::kernel {

using logic::BitVec;
using logic::BoolExpr;

namespace {

// Cheap unsatisfiability filter: builders already fold constants, so a guard
// of the form l & ~true has collapsed to false; additionally a conjunction
// carrying complementary literal conjuncts is dropped.
bool obviously_unsat(const BoolExpr& g) {
    if (g.is_false()) return true;
    if (g.op() != logic::BoolOp::And) return false;
    std::set<int> pos, neg;
    for (const auto& k : g.kids()) {
        if (k.op() == logic::BoolOp::Var) pos.insert(k.var_id());
        if (k.op() == logic::BoolOp::Not && k.kids()[0].op() == logic::BoolOp::Var)
            neg.insert(k.kids()[0].var_id());
    }
    for (int v : pos)
        if (neg.count(v)) return true;
    return false;
}

void add_effect(std::vector<std::pair<int, bool>>& effect, int prop, bool sign) {
    auto it = std::lower_bound(effect.begin(), effect.end(), std::make_pair(prop, false));
    effect.insert(it, {prop, sign});
}

}  // namespace

BoolExpr read_guard(const policy::Policy& pol, int agent, int prop) {
    std::vector<BoolExpr> parts;
    for (const auto& r : pol.reads)
        if (r.agent == agent && r.target == prop) parts.push_back(r.guard);
    if (parts.empty()) return BoolExpr::constant(false);
    return BoolExpr::disj(std::move(parts));
}

WovenActions incorporate_read_permissions(const policy::Policy& pol,
                                          const DeriveOptions& opt) {
    WovenActions out;
    out.universe = make_universe(pol);
    const Universe& u = out.universe;
    int n_policy = u.policy_count();

    for (const auto& ga : pol.actions) {
        Action a;
        a.id = ga.id;
        a.agent = ga.agent + 1;  // universe slot 0 is the environment
        a.effect = ga.effect;
        a.guard = ga.guard;
        out.actions.push_back(std::move(a));
    }

    for (size_t ai = 0; ai < pol.agents.size(); ++ai) {
        int agent = static_cast<int>(ai) + 1;
        for (int p = 0; p < n_policy; ++p) {
            BoolExpr lr = read_guard(pol, static_cast<int>(ai), p);
            std::vector<int> lr_vars = lr.vars();
            int loc = u.loc_index(agent, p);
            int read = u.read_index(agent, p);

            std::vector<Action> next;
            next.reserve(out.actions.size());
            auto push = [&](Action&& a) {
                if (obviously_unsat(a.guard)) return;
                next.push_back(std::move(a));
                if (next.size() > opt.max_actions)
                    throw CapacityError("action set exceeds the configured bound (" +
                                        std::to_string(opt.max_actions) + ")");
            };

            for (const auto& act : out.actions) {
                // Sign of p in the effect, and the next-state values the
                // effect forces on the read guard's propositions.
                std::optional<bool> p_sign;
                std::map<int, bool> next_vals;
                for (const auto& [q, sgn] : act.effect) {
                    if (q >= n_policy) continue;
                    if (q == p) p_sign = sgn;
                    next_vals[q] = sgn;
                }
                BoolExpr lr_next = lr.restrict(next_vals);

                if (p_sign.has_value()) {
                    Action a1 = act;
                    a1.id += "/" + u.agents[static_cast<size_t>(agent)] + "'" +
                             std::to_string(p) + "r";
                    add_effect(a1.effect, loc, *p_sign);
                    add_effect(a1.effect, read, true);
                    a1.guard = BoolExpr::conj({act.guard, lr_next});
                    push(std::move(a1));

                    Action a2 = act;
                    a2.id += "/" + u.agents[static_cast<size_t>(agent)] + "'" +
                             std::to_string(p) + "n";
                    add_effect(a2.effect, read, false);
                    a2.guard = BoolExpr::conj({act.guard, BoolExpr::negate(lr_next)});
                    push(std::move(a2));
                    continue;
                }

                bool touches_guard = false;
                for (int q : lr_vars)
                    if (next_vals.count(q)) {
                        touches_guard = true;
                        break;
                    }
                if (!touches_guard) {
                    next.push_back(act);
                    continue;
                }

                // p itself is untouched but its readability may change; the
                // local copy snapshots the current value when access appears.
                Action a1 = act;
                a1.id += "/" + u.agents[static_cast<size_t>(agent)] + "'" +
                         std::to_string(p) + "rt";
                add_effect(a1.effect, loc, true);
                add_effect(a1.effect, read, true);
                a1.guard = BoolExpr::conj({act.guard, lr_next, BoolExpr::var(p)});
                push(std::move(a1));

                Action a2 = act;
                a2.id += "/" + u.agents[static_cast<size_t>(agent)] + "'" +
                         std::to_string(p) + "rf";
                add_effect(a2.effect, loc, false);
                add_effect(a2.effect, read, true);
                a2.guard =
                    BoolExpr::conj({act.guard, lr_next, BoolExpr::negate(BoolExpr::var(p))});
                push(std::move(a2));

                Action a3 = act;
                a3.id += "/" + u.agents[static_cast<size_t>(agent)] + "'" +
                         std::to_string(p) + "n";
                add_effect(a3.effect, read, false);
                a3.guard = BoolExpr::conj({act.guard, BoolExpr::negate(lr_next)});
                push(std::move(a3));
            }
            out.actions = std::move(next);
        }
    }
    return out;
}

std::vector<BitVec> build_initial_states(const Universe& u, const policy::Policy& pol,
                                         const BoolExpr& init, const DeriveOptions& opt) {
    int n_policy = u.policy_count();
    int n_agents = static_cast<int>(u.agents.size()) - 1;

    std::vector<logic::Literal> lits;
    std::vector<BoolExpr> rest;
    logic::split_conjuncts(init, lits, rest);
    if (init.is_false()) return {};

    std::map<int, bool> pinned;
    for (const auto& l : lits) {
        auto it = pinned.find(l.var);
        if (it != pinned.end() && it->second != l.positive) return {};
        pinned[l.var] = l.positive;
    }

    std::vector<int> free_policy;
    for (int p = 0; p < n_policy; ++p)
        if (!pinned.count(p)) free_policy.push_back(p);
    if (free_policy.size() > 40)
        throw CapacityError("initial-state constraint leaves too many propositions free");

    std::vector<BoolExpr> guards;  // read guard per (agent, prop)
    guards.reserve(static_cast<size_t>(n_agents) * static_cast<size_t>(n_policy));
    for (int a = 0; a < n_agents; ++a)
        for (int p = 0; p < n_policy; ++p) guards.push_back(read_guard(pol, a, p));

    std::vector<BitVec> out;
    size_t produced = 0;

    auto consider = [&](BitVec& s) {
        if (init.eval(s)) {
            out.push_back(s);
            if (++produced > opt.max_initial)
                throw CapacityError("initial-state set exceeds the configured bound (" +
                                    std::to_string(opt.max_initial) + ")");
        }
    };

    // Enumerate free policy bits, then force read bits and granted local
    // copies, then enumerate whatever local copies remain unconstrained.
    std::vector<BitVec> policy_layer;
    {
        BitVec base(u.width());
        for (const auto& [v, val] : pinned)
            if (v < n_policy) base.set(v, val);
        std::function<void(size_t, BitVec&)> rec = [&](size_t i, BitVec& s) {
            if (i == free_policy.size()) {
                policy_layer.push_back(s);
                if (policy_layer.size() > opt.max_initial)
                    throw CapacityError("initial-state enumeration exceeds the configured "
                                        "bound");
                return;
            }
            s.set(free_policy[i], false);
            rec(i + 1, s);
            s.set(free_policy[i], true);
            rec(i + 1, s);
            s.set(free_policy[i], false);
        };
        rec(0, base);
    }

    for (BitVec s : policy_layer) {
        bool ok = true;
        std::vector<int> unknown_loc;
        for (int a = 0; a < n_agents && ok; ++a) {
            for (int p = 0; p < n_policy && ok; ++p) {
                int read = u.read_index(a + 1, p);
                int loc = u.loc_index(a + 1, p);
                bool granted =
                    guards[static_cast<size_t>(a) * static_cast<size_t>(n_policy) +
                           static_cast<size_t>(p)]
                        .eval(s);
                auto rp = pinned.find(read);
                if (rp != pinned.end() && rp->second != granted) ok = false;
                s.set(read, granted);
                auto lp = pinned.find(loc);
                if (granted) {
                    bool want = s.get(p);
                    if (lp != pinned.end() && lp->second != want) ok = false;
                    s.set(loc, want);
                } else if (lp != pinned.end()) {
                    s.set(loc, lp->second);
                } else {
                    unknown_loc.push_back(loc);
                }
            }
        }
        if (!ok) continue;

        // Unit propagation over the residual conjuncts narrows the free
        // local copies (e.g. "read | ~loc" closures) before enumeration.
        {
            std::map<int, bool> known;
            for (int i = 0; i < u.width(); ++i)
                if (std::find(unknown_loc.begin(), unknown_loc.end(), i) ==
                    unknown_loc.end())
                    known[i] = s.get(i);
            bool changed = true;
            std::vector<BoolExpr> residual = rest;
            while (changed && ok) {
                changed = false;
                for (auto& r : residual) {
                    BoolExpr red = r.restrict(known);
                    if (red.is_false()) {
                        ok = false;
                        break;
                    }
                    if (red.is_literal()) {
                        int v = red.op() == logic::BoolOp::Var ? red.var_id()
                                                                : red.kids()[0].var_id();
                        bool val = red.op() == logic::BoolOp::Var;
                        known[v] = val;
                        auto it = std::find(unknown_loc.begin(), unknown_loc.end(), v);
                        if (it != unknown_loc.end()) {
                            s.set(v, val);
                            unknown_loc.erase(it);
                            changed = true;
                        }
                    }
                    r = red;
                }
            }
        }
        if (!ok) continue;

        if (unknown_loc.size() > 40)
            throw CapacityError("initial-state constraint leaves too many local copies free"
                                " (consider @loc_closed)");
        std::function<void(size_t, BitVec&)> rec = [&](size_t i, BitVec& st) {
            if (i == unknown_loc.size()) {
                consider(st);
                return;
            }
            st.set(unknown_loc[i], false);
            rec(i + 1, st);
            st.set(unknown_loc[i], true);
            rec(i + 1, st);
            st.set(unknown_loc[i], false);
        };
        rec(0, s);
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

System derive_system(const policy::Policy& pol, const BoolExpr& init,
                     const DeriveOptions& opt) {
    WovenActions woven = incorporate_read_permissions(pol, opt);
    System sys;
    sys.universe = std::move(woven.universe);
    sys.actions = std::move(woven.actions);
    sys.initial = build_initial_states(sys.universe, pol, init, opt);
    sys.initial_unsat = sys.initial.empty();
    return sys;
}

}  // namespace acv::kernel
