#include "acv/cegar.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "acv/error.hpp"

namespace acv::cegar {

using abs::AbstractionMap;
using kernel::StateSet;
using logic::BitVec;
using logic::BoolExpr;
using logic::Clause;
using mc::CeTree;

namespace {

StateSet filter_preimage(const StateSet& in, const AbstractionMap& map, const BitVec& abs) {
    StateSet out;
    for (const auto& s : in)
        if (map.in_preimage(s, abs)) out.insert(s);
    return out;
}

StateSet initial_region(const kernel::System& concrete, const AbstractionMap& map,
                        const BitVec& abs) {
    StateSet out;
    for (const auto& s0 : concrete.initial)
        if (map.in_preimage(s0, abs)) out.insert(s0);
    return out;
}

StateSet intersect_r(const RSet& r, const StateSet& candidates, const AbstractionMap& map,
                     const BitVec& abs) {
    if (r.whole) return filter_preimage(candidates, map, abs);
    StateSet out;
    for (const auto& s : candidates)
        if (r.states.count(s)) out.insert(s);
    return out;
}

std::set<BitVec> local_states(const kernel::System& sys, int agent, const StateSet& states) {
    std::set<BitVec> out;
    for (const auto& s : states) out.insert(sys.universe.local_state(s, agent));
    return out;
}

// Bits on which the union of the given sets is not constant.
std::vector<int> varying_bits(const std::vector<const StateSet*>& sets, int width) {
    std::vector<int> out;
    for (int p = 0; p < width; ++p) {
        int seen = -1;
        bool varies = false;
        for (const StateSet* set : sets) {
            for (const auto& s : *set) {
                int v = s.get(p) ? 1 : 0;
                if (seen == -1) seen = v;
                if (v != seen) {
                    varies = true;
                    break;
                }
            }
            if (varies) break;
        }
        if (varies) out.push_back(p);
    }
    return out;
}

bool clause_excludes_set(const Clause& c, const StateSet& states) {
    for (const auto& s : states) {
        bool sat = false;
        for (const auto& l : c)
            if (s.get(l.var) == l.positive) {
                sat = true;
                break;
            }
        if (sat) return false;
    }
    return true;
}

// Against a symbolic preimage (a cube over the visible bits): the clause is
// excluded iff the cube forces every literal false.
bool clause_excludes_cube(const Clause& c, const AbstractionMap& map, const BitVec& abs) {
    for (const auto& l : c) {
        int p = map.pos[static_cast<size_t>(l.var)];
        if (p < 0) return false;  // hidden bit is free in the cube
        if (abs.get(p) == l.positive) return false;
    }
    return true;
}

struct PathView {
    std::vector<int> edges;       // edge indices of the tree
    std::vector<BitVec> states;   // abstract states, positions 0..edges.size()
};

PathView view_path(const CeTree& ce, const std::vector<int>& edges) {
    PathView v;
    v.edges = edges;
    v.states.push_back(ce.vertices[static_cast<size_t>(ce.root)]);
    for (int e : edges) v.states.push_back(ce.vertices[static_cast<size_t>(ce.edges[static_cast<size_t>(e)].to)]);
    return v;
}

struct ForwardRun {
    std::vector<StateSet> at;           // per position
    std::vector<StateSet> witness_end;  // per edge (empty for temporal)
    bool died = false;
    size_t die_edge = 0;
    bool witness_spurious = false;
};

class Analyzer {
public:
    Analyzer(const CeTree& ce, const kernel::System& concrete, const AbstractionMap& map,
             const CeOptions& opt, const kernel::System* abstract,
             const mc::ReachIndex* abs_reach)
        : ce_(ce), concrete_(concrete), map_(map), opt_(opt), abstract_(abstract),
          abs_reach_(abs_reach) {}

    const BitVec& root_state() const { return ce_.vertices[static_cast<size_t>(ce_.root)]; }

    StateSet witness_forward(const mc::WitnessPath& w) const {
        StateSet st = initial_region(concrete_, map_, w.start);
        for (const auto& [abs_act, abs_to] : w.steps) {
            st = forward_step_temporal(concrete_, map_, abs_act, abs_to, st);
            if (st.empty()) break;
        }
        return st;
    }

    // Endpoints of the concrete paths corresponding to the witness; in the
    // all-paths mode, the union over every shortest abstract witness.
    StateSet witness_endpoints(const mc::CeEdge& e) const {
        if (!opt_.all_shortest_witnesses || abstract_ == nullptr || abs_reach_ == nullptr)
            return witness_forward(e.witness);
        StateSet out;
        size_t count = 0;
        const BitVec& target = ce_.vertices[static_cast<size_t>(e.to)];
        int tid = abs_reach_->id_of(target);
        if (tid < 0) return out;
        // BFS distances from the abstract initial states.
        std::vector<int> dist(abs_reach_->size(), -1);
        std::deque<int> q;
        for (const auto& s0 : abstract_->initial) {
            int id = abs_reach_->id_of(s0);
            if (id >= 0 && dist[static_cast<size_t>(id)] == -1) {
                dist[static_cast<size_t>(id)] = 0;
                q.push_back(id);
            }
        }
        while (!q.empty()) {
            int s = q.front();
            q.pop_front();
            for (const auto& [act, to] : abs_reach_->succs[static_cast<size_t>(s)])
                if (dist[static_cast<size_t>(to)] == -1) {
                    dist[static_cast<size_t>(to)] = dist[static_cast<size_t>(s)] + 1;
                    q.push_back(to);
                }
        }
        if (dist[static_cast<size_t>(tid)] == -1) return out;
        // Walk every shortest path backwards from the target.
        std::vector<std::pair<int, int>> rev;  // (action, state) suffix, reversed
        std::function<void(int)> walk = [&](int v) {
            if (count >= opt_.max_witness_paths) return;
            if (dist[static_cast<size_t>(v)] == 0) {
                mc::WitnessPath w;
                w.start = abs_reach_->states[static_cast<size_t>(v)];
                for (auto it = rev.rbegin(); it != rev.rend(); ++it)
                    w.steps.push_back({it->first, abs_reach_->states[static_cast<size_t>(it->second)]});
                StateSet st = witness_forward(w);
                out.insert(st.begin(), st.end());
                ++count;
                return;
            }
            for (const auto& [act, from] : abs_reach_->preds[static_cast<size_t>(v)]) {
                if (dist[static_cast<size_t>(from)] != dist[static_cast<size_t>(v)] - 1) continue;
                rev.push_back({act, v});
                walk(from);
                rev.pop_back();
            }
        };
        walk(tid);
        return out;
    }

    // Plain forward rules along a path.
    ForwardRun forward(const PathView& p, StateSet start) const {
        ForwardRun run;
        run.at.push_back(std::move(start));
        run.witness_end.resize(p.edges.size());
        for (size_t i = 0; i < p.edges.size(); ++i) {
            const mc::CeEdge& e = ce_.edges[static_cast<size_t>(p.edges[i])];
            StateSet next;
            if (!e.epistemic) {
                next = forward_step_temporal(concrete_, map_, e.action, p.states[i + 1],
                                             run.at.back());
            } else {
                run.witness_end[i] = witness_endpoints(e);
                if (run.witness_end[i].empty()) {
                    run.witness_spurious = true;
                    run.died = true;
                    run.die_edge = i;
                    return run;
                }
                auto locals = local_states(concrete_, e.agent, run.at.back());
                for (const auto& s : run.witness_end[i])
                    if (locals.count(concrete_.universe.local_state(s, e.agent)))
                        next.insert(s);
            }
            if (next.empty()) {
                run.died = true;
                run.die_edge = i;
                return run;
            }
            run.at.push_back(std::move(next));
        }
        return run;
    }

    // Backward survivor sets, seeded at the leaf, intersecting with the
    // plain forward sets along the way.
    std::vector<StateSet> backward(const PathView& p, const ForwardRun& plain,
                                   StateSet seed) const {
        std::vector<StateSet> back(p.states.size());
        back[p.edges.size()] = std::move(seed);
        for (size_t i = p.edges.size(); i-- > 0;) {
            const mc::CeEdge& e = ce_.edges[static_cast<size_t>(p.edges[i])];
            if (!e.epistemic) {
                StateSet preds;
                for (int a : map_.members[static_cast<size_t>(e.action)]) {
                    StateSet pa = kernel::pre_image(concrete_, a, back[i + 1]);
                    preds.insert(pa.begin(), pa.end());
                }
                StateSet out;
                for (const auto& s : preds)
                    if (plain.at[i].count(s)) out.insert(s);
                back[i] = std::move(out);
            } else {
                StateSet meet;
                for (const auto& s : back[i + 1])
                    if (plain.witness_end[i].count(s)) meet.insert(s);
                auto locals = local_states(concrete_, e.agent, meet);
                StateSet out;
                for (const auto& s : plain.at[i])
                    if (locals.count(concrete_.universe.local_state(s, e.agent)))
                        out.insert(s);
                back[i] = std::move(out);
            }
        }
        return back;
    }

    const CeTree& ce_;
    const kernel::System& concrete_;
    const AbstractionMap& map_;
    CeOptions opt_;
    const kernel::System* abstract_;
    const mc::ReachIndex* abs_reach_;
};

}  // namespace

StateSet forward_step_temporal(const kernel::System& concrete, const AbstractionMap& map,
                               int abs_action, const BitVec& abs_target, const StateSet& st) {
    StateSet out;
    for (int a : map.members[static_cast<size_t>(abs_action)]) {
        for (const auto& s : st) {
            auto t = kernel::apply_action(concrete.actions[static_cast<size_t>(a)], s);
            if (t && map.in_preimage(*t, abs_target)) out.insert(*t);
        }
    }
    return out;
}

EpistemicStep forward_step_epistemic(const kernel::System& concrete,
                                     const AbstractionMap& map, int agent,
                                     const mc::WitnessPath& witness, const StateSet& st,
                                     const CeOptions& opt, const kernel::System* abstract,
                                     const mc::ReachIndex* abs_reach) {
    CeTree dummy;
    Analyzer an(dummy, concrete, map, opt, abstract, abs_reach);
    EpistemicStep step;
    step.witness_end = an.witness_forward(witness);
    if (step.witness_end.empty()) {
        step.witness_spurious = true;
        return step;
    }
    auto locals = local_states(concrete, agent, st);
    for (const auto& s : step.witness_end)
        if (locals.count(concrete.universe.local_state(s, agent))) step.result.insert(s);
    return step;
}

CeCheckResult check_ce(const CeTree& ce, const kernel::System& concrete,
                       const AbstractionMap& map, const CeOptions& opt,
                       const kernel::System* abstract, const mc::ReachIndex* abs_reach) {
    Analyzer an(ce, concrete, map, opt, abstract, abs_reach);
    const BitVec& root = an.root_state();

    // Loop-free requirement: no repeated state inside one temporal segment.
    for (const auto& path : ce.paths()) {
        std::set<BitVec> seg;
        seg.insert(root);
        BitVec cur = root;
        for (int ei : path) {
            const mc::CeEdge& e = ce.edges[static_cast<size_t>(ei)];
            cur = ce.vertices[static_cast<size_t>(e.to)];
            if (e.epistemic) {
                seg.clear();
            } else if (!seg.insert(cur).second) {
                throw Error("malformed counterexample: temporal loop through " +
                            cur.to_string());
            }
        }
    }

    std::map<BitVec, RSet> r;
    r[root] = RSet{false, initial_region(concrete, map, root)};

    CeCheckResult res;
    if (r[root].states.empty()) {
        res.valid = false;
        res.note = "root has no concrete initial state";
        return res;
    }

    for (const auto& path : ce.paths()) {
        PathView p = view_path(ce, path);
        ForwardRun gate = an.forward(p, r[root].states);
        if (gate.died) {
            res.valid = false;
            res.note = gate.witness_spurious ? "witness path has no concrete counterpart"
                                             : "forward run died";
            return res;
        }
        ForwardRun plain = an.forward(p, initial_region(concrete, map, root));
        auto back = an.backward(p, plain, gate.at.back());
        for (size_t pos = 0; pos < p.states.size(); ++pos) {
            const BitVec& v = p.states[pos];
            auto it = r.find(v);
            if (it == r.end()) {
                r[v] = RSet{false, back[pos]};
            } else {
                it->second.states = intersect_r(it->second, back[pos], map, v);
                it->second.whole = false;
            }
            if (r[v].states.empty()) {
                res.valid = false;
                res.note = "no common concrete state for " + v.to_string();
                return res;
            }
        }
    }

    res.valid = true;
    for (const auto& [v, rs] : r) res.survivors[v] = rs.states;
    return res;
}

std::vector<Clause> conflict_clauses(const BoolExpr& base, const BoolExpr& conflict,
                                     size_t max_clauses) {
    auto cnf = logic::to_cnf(conflict, max_clauses);
    if (!cnf) throw CapacityError("conflict formula is too large to convert to CNF");
    std::vector<Clause> out;
    for (const auto& c : *cnf) {
        BoolExpr both = BoolExpr::conj({clause_to_expr(c), base});
        if (!logic::satisfiable(both)) out.push_back(c);
    }
    std::stable_sort(out.begin(), out.end(), [](const Clause& a, const Clause& b) {
        return a.size() < b.size();
    });
    return out;
}

namespace {

struct ClauseHunt {
    std::vector<std::pair<BoolExpr, BoolExpr>> formulas;
    std::vector<Clause> chosen;
    std::set<int> props;
};

// CNF the conflict formula and keep the smallest clause that contradicts the
// base set (or cube) and mentions at least one hidden proposition.
void hunt(ClauseHunt& h, const AbstractionMap& map, const BoolExpr& base_formula,
          const BoolExpr& conflict_formula, const StateSet* base_set,
          const BitVec* base_cube) {
    h.formulas.emplace_back(base_formula, conflict_formula);
    auto cnf = logic::to_cnf(conflict_formula, 10000);
    if (!cnf) return;  // escalation will cover this
    std::vector<Clause> hits;
    for (const auto& c : *cnf) {
        bool excluded = base_set ? clause_excludes_set(c, *base_set)
                                 : clause_excludes_cube(c, map, *base_cube);
        if (excluded) hits.push_back(c);
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const Clause& a, const Clause& b) { return a.size() < b.size(); });
    for (const auto& c : hits) {
        bool reveals = false;
        for (const auto& l : c)
            if (!map.is_visible(l.var)) reveals = true;
        if (!reveals) continue;
        h.chosen.push_back(c);
        for (const auto& l : c)
            if (!map.is_visible(l.var)) h.props.insert(l.var);
        return;
    }
    // Keep the smallest conflict clause for the report even when it reveals
    // nothing new.
    if (!hits.empty()) h.chosen.push_back(hits.front());
}

FailureDiagnosis diagnose_temporal(const Analyzer& an, const PathView& p, size_t edge_pos,
                                   const StateSet& st_d, const RSet& r_target) {
    const mc::CeEdge& e = an.ce_.edges[static_cast<size_t>(p.edges[edge_pos])];
    const kernel::System& sys = an.concrete_;
    const AbstractionMap& map = an.map_;
    const BitVec& target = p.states[edge_pos + 1];

    FailureDiagnosis d;
    d.failure_state = p.states[edge_pos];
    d.dead_end = st_d;
    d.epistemic_edge = false;

    ClauseHunt h;
    bool any_image = false;
    for (int a : map.members[static_cast<size_t>(e.action)]) {
        const kernel::Action& act = sys.actions[static_cast<size_t>(a)];
        StateSet img;
        for (const auto& s : st_d)
            if (auto t = kernel::apply_action(act, s)) img.insert(*t);
        if (img.empty()) {
            // The guard blocks every dead-end state.
            std::vector<int> supp = varying_bits({&st_d}, sys.width());
            for (int v : act.guard.vars())
                if (std::find(supp.begin(), supp.end(), v) == supp.end()) supp.push_back(v);
            std::sort(supp.begin(), supp.end());
            BoolExpr base = logic::cubes_formula({st_d.begin(), st_d.end()}, supp);
            hunt(h, map, base, act.guard, &st_d, nullptr);
        } else {
            any_image = true;
            // Successors exist but miss the survivor set of the target.
            BoolExpr base, conflict;
            std::vector<const StateSet*> parts{&img};
            if (!r_target.whole) parts.push_back(&r_target.states);
            std::vector<int> supp = varying_bits(parts, sys.width());
            std::vector<BitVec> imgv(img.begin(), img.end());
            conflict = logic::cubes_formula(imgv, supp);
            if (r_target.whole) {
                std::vector<BoolExpr> lits;
                for (size_t i = 0; i < map.visible.size(); ++i)
                    lits.push_back(BoolExpr::lit(map.visible[i], target.get(static_cast<int>(i))));
                base = BoolExpr::conj(std::move(lits));
                hunt(h, map, base, conflict, nullptr, &target);
            } else {
                std::vector<BitVec> rv(r_target.states.begin(), r_target.states.end());
                base = logic::cubes_formula(rv, supp);
                hunt(h, map, base, conflict, &r_target.states, nullptr);
            }
        }
    }
    d.reason = any_image ? "successors miss the survivor set" : "no action is performable";

    // Bad states: preimage members of the failure state that do reach the
    // survivor set.
    if (!r_target.whole) {
        for (int a : map.members[static_cast<size_t>(e.action)]) {
            StateSet pre = kernel::pre_image(sys, a, r_target.states);
            for (const auto& s : pre)
                if (map.in_preimage(s, d.failure_state)) d.bad.insert(s);
        }
    }

    d.formulas = std::move(h.formulas);
    d.clauses = std::move(h.chosen);
    d.props_to_add.assign(h.props.begin(), h.props.end());
    return d;
}

FailureDiagnosis diagnose_epistemic(const Analyzer& an, const PathView& p, size_t edge_pos,
                                    const StateSet& st_d, const RSet& r_target,
                                    const StateSet& witness_end, const StateSet& candidate) {
    const mc::CeEdge& e = an.ce_.edges[static_cast<size_t>(p.edges[edge_pos])];
    const kernel::System& sys = an.concrete_;
    const AbstractionMap& map = an.map_;
    const BitVec& target = p.states[edge_pos + 1];

    FailureDiagnosis d;
    d.failure_state = p.states[edge_pos];
    d.dead_end = st_d;
    d.epistemic_edge = true;
    d.edge_agent = e.agent;

    ClauseHunt h;
    if (candidate.empty()) {
        // Witness endpoints and the survivor set are disjoint.
        d.reason = "witness endpoints miss the survivor set";
        std::vector<const StateSet*> parts{&witness_end};
        if (!r_target.whole) parts.push_back(&r_target.states);
        std::vector<int> supp = varying_bits(parts, sys.width());
        BoolExpr conflict =
            logic::cubes_formula({witness_end.begin(), witness_end.end()}, supp);
        if (r_target.whole) {
            std::vector<BoolExpr> lits;
            for (size_t i = 0; i < map.visible.size(); ++i)
                lits.push_back(BoolExpr::lit(map.visible[i], target.get(static_cast<int>(i))));
            hunt(h, map, BoolExpr::conj(std::move(lits)), conflict, nullptr, &target);
        } else {
            BoolExpr base = logic::cubes_formula(
                {r_target.states.begin(), r_target.states.end()}, supp);
            hunt(h, map, base, conflict, &r_target.states, nullptr);
        }
        d.bad = candidate;
    } else {
        // No shared local state between the dead ends and the candidates.
        d.reason = "no shared local state with the witness endpoints";
        auto span = sys.universe.span[static_cast<size_t>(e.agent)];
        std::vector<int> agent_bits;
        for (int b = span.first; b < span.second; ++b) agent_bits.push_back(b);
        std::vector<int> supp;
        for (int b : agent_bits) {
            auto varies = varying_bits({&st_d, &candidate}, sys.width());
            if (std::find(varies.begin(), varies.end(), b) != varies.end()) supp.push_back(b);
        }
        if (supp.empty()) supp = agent_bits;
        BoolExpr base = logic::cubes_formula({st_d.begin(), st_d.end()}, supp);
        BoolExpr conflict = logic::cubes_formula({candidate.begin(), candidate.end()}, supp);
        hunt(h, map, base, conflict, &st_d, nullptr);
        d.bad = candidate;
    }

    d.formulas = std::move(h.formulas);
    d.clauses = std::move(h.chosen);
    d.props_to_add.assign(h.props.begin(), h.props.end());
    return d;
}

CeTree linear_tree(const BitVec& root, const mc::WitnessPath& w) {
    CeTree t;
    t.root = t.add_vertex(root);
    int cur = t.root;
    for (const auto& [act, st] : w.steps) {
        mc::CeEdge e;
        e.from = cur;
        e.to = t.add_vertex(st);
        e.action = act;
        cur = e.to;
        t.add_edge(std::move(e));
    }
    return t;
}

}  // namespace

FailureDiagnosis find_failure(const CeTree& ce, const kernel::System& concrete,
                              const AbstractionMap& map, const CeOptions& opt,
                              const kernel::System* abstract,
                              const mc::ReachIndex* abs_reach) {
    Analyzer an(ce, concrete, map, opt, abstract, abs_reach);
    const BitVec& root = an.root_state();

    std::map<BitVec, RSet> r;
    r[root] = RSet{false, initial_region(concrete, map, root)};

    for (const auto& path : ce.paths()) {
        PathView p = view_path(ce, path);
        StateSet st = r[root].states;
        bool died = false;
        for (size_t i = 0; i < p.edges.size() && !died; ++i) {
            const mc::CeEdge& e = ce.edges[static_cast<size_t>(p.edges[i])];
            const BitVec& target = p.states[i + 1];
            RSet r_target = r.count(target) ? r[target] : RSet{};
            if (!e.epistemic) {
                StateSet raw;
                for (int a : map.members[static_cast<size_t>(e.action)])
                    for (const auto& s : st)
                        if (auto t = kernel::apply_action(
                                concrete.actions[static_cast<size_t>(a)], s))
                            raw.insert(*t);
                StateSet next = intersect_r(r_target, raw, map, target);
                if (next.empty()) return diagnose_temporal(an, p, i, st, r_target);
                st = std::move(next);
            } else {
                StateSet wend = an.witness_endpoints(e);
                if (wend.empty()) {
                    // The witness itself is spurious; analyse it as a linear
                    // counterexample instead of the main path.
                    CeTree wtree = linear_tree(e.witness.start, e.witness);
                    FailureDiagnosis d =
                        find_failure(wtree, concrete, map, opt, abstract, abs_reach);
                    d.reason = "spurious reachability witness: " + d.reason;
                    return d;
                }
                StateSet candidate = intersect_r(r_target, wend, map, target);
                auto locals = local_states(concrete, e.agent, st);
                StateSet next;
                for (const auto& s : candidate)
                    if (locals.count(concrete.universe.local_state(s, e.agent)))
                        next.insert(s);
                if (next.empty())
                    return diagnose_epistemic(an, p, i, st, r_target, wend, candidate);
                st = std::move(next);
            }
        }
        // Path survived: fold its survivor sets into r and continue.
        ForwardRun plain = an.forward(p, initial_region(concrete, map, root));
        auto back = an.backward(p, plain, st);
        for (size_t pos = 0; pos < p.states.size(); ++pos) {
            const BitVec& v = p.states[pos];
            auto it = r.find(v);
            if (it == r.end()) {
                r[v] = RSet{false, back[pos]};
            } else {
                it->second.states = intersect_r(it->second, back[pos], map, v);
                it->second.whole = false;
            }
        }
    }
    throw Error("internal: no failure state found in a spurious counterexample");
}

std::vector<int> refine(const AbstractionMap& map, const kernel::Universe& u,
                        const FailureDiagnosis& diag) {
    std::set<int> next(map.visible.begin(), map.visible.end());
    size_t before = next.size();
    for (int p : diag.props_to_add) next.insert(p);

    if (next.size() == before) {
        // Escalation: reveal every hidden bit separating the dead ends from
        // the bad states.
        for (int p = 0; p < u.width(); ++p) {
            if (map.is_visible(p)) continue;
            bool d0 = false, d1 = false, b0 = false, b1 = false;
            for (const auto& s : diag.dead_end) (s.get(p) ? d1 : d0) = true;
            for (const auto& s : diag.bad) (s.get(p) ? b1 : b0) = true;
            if ((d0 && b1) || (d1 && b0)) next.insert(p);
        }
    }
    if (next.size() == before) {
        // Conflict formulas themselves name the involved propositions.
        for (const auto& [base, conflict] : diag.formulas) {
            for (int v : base.vars())
                if (!map.is_visible(v)) next.insert(v);
            for (int v : conflict.vars())
                if (!map.is_visible(v)) next.insert(v);
        }
    }
    if (next.size() == before) {
        for (int p = 0; p < u.width(); ++p) next.insert(p);
    }
    if (next.size() == before)
        throw Error("internal: refinement cannot grow a fully concrete abstraction");
    return {next.begin(), next.end()};
}

// ── Concretization ──────────────────────────────────────────────────────────

namespace {

// Picks one concrete state per abstract vertex, consistent across shared
// states, such that every tree edge is realized; reconstructs concrete
// witness paths for the epistemic edges.
std::optional<CeTree> concretize(const CeTree& ce, const CeCheckResult& res,
                                 const kernel::System& concrete, const AbstractionMap& map,
                                 const CeOptions& opt, const kernel::System* abstract,
                                 const mc::ReachIndex* abs_reach) {
    Analyzer an(ce, concrete, map, opt, abstract, abs_reach);

    std::map<BitVec, std::vector<BitVec>> domain;
    for (const auto& [v, set] : res.survivors) domain[v] = {set.begin(), set.end()};

    // Order the abstract states by first appearance.
    std::vector<BitVec> order;
    {
        std::set<BitVec> seen;
        auto add = [&](const BitVec& v) {
            if (seen.insert(v).second) order.push_back(v);
        };
        add(an.root_state());
        for (const auto& e : ce.edges) {
            add(ce.vertices[static_cast<size_t>(e.from)]);
            add(ce.vertices[static_cast<size_t>(e.to)]);
        }
    }

    std::map<BitVec, BitVec> pick;
    // Edge constraints grouped by the pair of abstract endpoint states.
    struct EdgeC {
        const mc::CeEdge* e;
        BitVec from, to;
    };
    std::vector<EdgeC> cons;
    for (const auto& e : ce.edges)
        cons.push_back({&e, ce.vertices[static_cast<size_t>(e.from)],
                        ce.vertices[static_cast<size_t>(e.to)]});

    std::map<const mc::CeEdge*, StateSet> wit_end;
    for (const auto& c : cons)
        if (c.e->epistemic) wit_end[c.e] = an.witness_endpoints(*c.e);

    auto feasible = [&](const EdgeC& c) {
        auto fi = pick.find(c.from), ti = pick.find(c.to);
        if (fi == pick.end() || ti == pick.end()) return true;
        if (!c.e->epistemic) {
            for (int a : map.members[static_cast<size_t>(c.e->action)]) {
                auto img = kernel::apply_action(concrete.actions[static_cast<size_t>(a)],
                                                fi->second);
                if (img && *img == ti->second) return true;
            }
            return false;
        }
        if (concrete.universe.local_state(fi->second, c.e->agent) !=
            concrete.universe.local_state(ti->second, c.e->agent))
            return false;
        return wit_end[c.e].count(ti->second) > 0;
    };

    std::function<bool(size_t)> assign = [&](size_t i) {
        if (i == order.size()) return true;
        for (const auto& cand : domain[order[i]]) {
            pick[order[i]] = cand;
            bool ok = true;
            for (const auto& c : cons)
                if (!feasible(c)) {
                    ok = false;
                    break;
                }
            if (ok && assign(i + 1)) return true;
            pick.erase(order[i]);
        }
        return false;
    };
    if (!assign(0)) return std::nullopt;

    // Rebuild the tree over the chosen states.
    CeTree out;
    std::vector<int> vmap(ce.vertices.size(), -1);
    for (size_t v = 0; v < ce.vertices.size(); ++v)
        vmap[v] = out.add_vertex(pick[ce.vertices[v]]);
    out.root = vmap[static_cast<size_t>(ce.root)];
    for (const auto& e : ce.edges) {
        mc::CeEdge ne;
        ne.from = vmap[static_cast<size_t>(e.from)];
        ne.to = vmap[static_cast<size_t>(e.to)];
        ne.epistemic = e.epistemic;
        if (!e.epistemic) {
            const BitVec& from = pick[ce.vertices[static_cast<size_t>(e.from)]];
            const BitVec& to = pick[ce.vertices[static_cast<size_t>(e.to)]];
            for (int a : map.members[static_cast<size_t>(e.action)]) {
                auto img =
                    kernel::apply_action(concrete.actions[static_cast<size_t>(a)], from);
                if (img && *img == to) {
                    ne.action = a;
                    break;
                }
            }
        } else {
            ne.agent = e.agent;
            // Concrete witness: walk the stored abstract witness forward,
            // then thread one chain ending at the chosen target.
            const BitVec& goal = pick[ce.vertices[static_cast<size_t>(e.to)]];
            std::vector<StateSet> layers;
            layers.push_back(initial_region(concrete, map, e.witness.start));
            for (const auto& [abs_act, abs_to] : e.witness.steps)
                layers.push_back(forward_step_temporal(concrete, map, abs_act, abs_to,
                                                       layers.back()));
            std::vector<BitVec> chain(layers.size());
            chain.back() = goal;
            std::vector<int> acts(e.witness.steps.size(), -1);
            for (size_t k = layers.size() - 1; k-- > 0;) {
                bool found = false;
                for (const auto& s : layers[k]) {
                    for (int a :
                         map.members[static_cast<size_t>(e.witness.steps[k].first)]) {
                        auto img = kernel::apply_action(
                            concrete.actions[static_cast<size_t>(a)], s);
                        if (img && *img == chain[k + 1]) {
                            chain[k] = s;
                            acts[k] = a;
                            found = true;
                            break;
                        }
                    }
                    if (found) break;
                }
                if (!found) return std::nullopt;
            }
            ne.witness.start = chain[0];
            for (size_t k = 0; k < acts.size(); ++k)
                ne.witness.steps.push_back({acts[k], chain[k + 1]});
        }
        out.add_edge(std::move(ne));
    }
    return out;
}

}  // namespace

CegarOutcome cegar_loop(const kernel::System& concrete, const logic::Ctlk& phi,
                        const std::vector<int>& init_atoms, const CegarOptions& opt) {
    bool universal = logic::is_actlk(phi);
    bool has_neg_k = logic::has_positive_negated_k(phi);
    if (!universal && !(opt.interactive && has_neg_k))
        throw Error(opt.interactive
                        ? "interactive verification needs a universal safety property, "
                          "possibly with ~K over propositional operands"
                        : "automatic refinement needs a universal safety property; "
                          "use interactive mode for ~K properties");
    if (!logic::in_counterexample_fragment(phi))
        throw Error("property outside the supported counterexample fragment");

    std::set<int> visible;
    for (int p : abs::initial_visible(phi, init_atoms)) visible.insert(p);
    for (int p : opt.seed_visible) visible.insert(p);

    int selector_agent = -1;
    if (has_neg_k) {
        std::function<void(const logic::Ctlk&, bool)> scan = [&](const logic::Ctlk& f,
                                                                 bool neg) {
            if (f.op() == logic::CtlkOp::K && neg && selector_agent < 0) {
                selector_agent = f.agent();
                return;
            }
            if (f.op() == logic::CtlkOp::Not) {
                scan(f.kids()[0], !neg);
                return;
            }
            if (f.op() == logic::CtlkOp::Implies) {
                scan(f.kids()[0], !neg);
                scan(f.kids()[1], neg);
                return;
            }
            for (const auto& k : f.kids()) scan(k, neg);
        };
        scan(phi, false);
    }

    CegarOutcome out;
    int selector_round = 0;
    for (size_t round = 0; round < opt.max_rounds; ++round) {
        abs::AbstractionMap map =
            abs::make_abstraction(concrete, {visible.begin(), visible.end()});
        kernel::System abstract = abs::abstract_system(concrete, map);
        mc::ReachIndex abs_reach = mc::reachable(abstract, opt.reach);
        mc::Evaluator ev(abstract, abs_reach);

        IterationLog log;
        log.round = static_cast<int>(round);
        log.visible = visible.size();
        log.abstract_states = abs_reach.size();
        log.abstract_holds = ev.holds(phi);

        if (log.abstract_holds) {
            if (universal || !has_neg_k) {
                log.analysis = "holds";
                out.trace.push_back(std::move(log));
                out.holds = true;
                return out;
            }
            // The property may hold only because ~K is satisfiable in the
            // abstraction without a witness: consult the selector.
            std::vector<int> candidates;
            auto span = concrete.universe.span[static_cast<size_t>(selector_agent)];
            for (int p = span.first; p < span.second; ++p)
                if (!visible.count(p)) candidates.push_back(p);
            if (candidates.empty()) {
                log.analysis = "holds";
                out.trace.push_back(std::move(log));
                out.holds = true;
                return out;
            }
            if (!opt.selector) throw Error("interactive mode needs a proposition selector");
            SelectorContext ctx{selector_agent, candidates, selector_round++};
            std::vector<int> chosen = opt.selector(ctx, concrete);
            if (chosen.empty())
                throw Error("selector returned no propositions while " +
                            std::to_string(candidates.size()) + " remain hidden");
            log.analysis = "selector";
            for (int p : chosen) {
                if (std::find(candidates.begin(), candidates.end(), p) == candidates.end())
                    throw Error("selector chose a proposition outside the candidate set");
                visible.insert(p);
                log.added.push_back(
                    concrete.universe.props[static_cast<size_t>(p)].name);
            }
            out.trace.push_back(std::move(log));
            continue;
        }

        auto ce = mc::counterexample(ev, phi);
        if (!ce) throw Error("internal: failing property produced no counterexample");
        log.ce_text = mc::ce_to_text(*ce, abstract);

        CeCheckResult chk = check_ce(*ce, concrete, map, opt.ce, &abstract, &abs_reach);
        if (chk.valid) {
            log.analysis = "valid";
            out.trace.push_back(std::move(log));
            out.concrete_ce =
                concretize(*ce, chk, concrete, map, opt.ce, &abstract, &abs_reach);
            if (!out.concrete_ce)
                throw Error("internal: validated counterexample failed to concretize");
            out.holds = false;
            return out;
        }

        FailureDiagnosis diag =
            find_failure(*ce, concrete, map, opt.ce, &abstract, &abs_reach);
        std::vector<int> next = refine(map, concrete.universe, diag);
        log.analysis = "spurious";
        log.failure_state = diag.failure_state.to_string();
        for (const auto& c : diag.clauses)
            log.clauses.push_back(logic::clause_to_expr(c).to_string([&](int v) {
                return concrete.universe.props[static_cast<size_t>(v)].name;
            }));
        for (int p : next)
            if (!visible.count(p))
                log.added.push_back(concrete.universe.props[static_cast<size_t>(p)].name);
        out.trace.push_back(std::move(log));
        if (next.size() <= visible.size())
            throw Error("internal: refinement did not grow the visible set");
        visible.clear();
        visible.insert(next.begin(), next.end());
    }
    throw Error("refinement did not converge within the round limit");
}

std::string trace_to_json(const std::vector<IterationLog>& trace) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& it : trace) {
        nlohmann::ordered_json e;
        e["round"] = it.round;
        e["visible"] = it.visible;
        e["abstract_states"] = it.abstract_states;
        e["abstract_holds"] = it.abstract_holds;
        e["analysis"] = it.analysis;
        if (!it.failure_state.empty()) e["failure_state"] = it.failure_state;
        if (!it.clauses.empty()) e["clauses"] = it.clauses;
        if (!it.added.empty()) e["added"] = it.added;
        j.push_back(e);
    }
    return j.dump(2);
}

}  // namespace acv::cegar
