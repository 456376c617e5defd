#include <algorithm>
#include <map>
#include <sstream>

#include "acv/error.hpp"
#include "acv/policy_ast.hpp"

namespace acv::policy {

namespace {

using logic::BoolExpr;

using Subst = std::map<std::string, std::string>;

std::string atom_name(const std::string& pred, const std::vector<std::string>& args) {
    if (args.empty()) return pred;
    std::string s = pred + "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ",";
        s += args[i];
    }
    return s + ")";
}

struct GroundCtx {
    const ParsedPolicy& parsed;
    const AtomTable& atoms;
    std::vector<std::string> domain;  // Σ, sorted by name

    int resolve_atom(const AtomTemplate& a, const Subst& sub) const {
        std::vector<std::string> args;
        args.reserve(a.args.size());
        for (const auto& t : a.args) {
            if (t.is_var) {
                auto it = sub.find(t.name);
                if (it == sub.end())
                    throw Error("unbound variable '" + t.name + "'", t.pos.line, t.pos.col);
                args.push_back(it->second);
            } else {
                args.push_back(t.name);
            }
        }
        int id = atoms.find(
            atom_name(parsed.predicates[static_cast<size_t>(a.pred)].name, args));
        if (id < 0)
            throw Error("atom does not ground to a declared proposition", a.pos.line, a.pos.col);
        return id;
    }

    BoolExpr ground_formula(const TemplateFormula& f, Subst& sub) const {
        switch (f.op) {
            case TfOp::True: return BoolExpr::constant(true);
            case TfOp::False: return BoolExpr::constant(false);
            case TfOp::Atom: return BoolExpr::var(resolve_atom(f.atom, sub));
            case TfOp::Not: return BoolExpr::negate(ground_formula(f.kids[0], sub));
            case TfOp::And:
                return BoolExpr::conj(
                    {ground_formula(f.kids[0], sub), ground_formula(f.kids[1], sub)});
            case TfOp::Or:
                return BoolExpr::disj(
                    {ground_formula(f.kids[0], sub), ground_formula(f.kids[1], sub)});
            case TfOp::Implies:
                return BoolExpr::implies(ground_formula(f.kids[0], sub),
                                         ground_formula(f.kids[1], sub));
            case TfOp::Forall:
            case TfOp::Exists: {
                std::vector<BoolExpr> parts;
                parts.reserve(domain.size());
                auto saved = sub.find(f.bound) != sub.end()
                                 ? std::optional<std::string>(sub[f.bound])
                                 : std::nullopt;
                for (const auto& obj : domain) {
                    sub[f.bound] = obj;
                    parts.push_back(ground_formula(f.kids[0], sub));
                }
                if (saved)
                    sub[f.bound] = *saved;
                else
                    sub.erase(f.bound);
                return f.op == TfOp::Forall ? BoolExpr::conj(std::move(parts))
                                            : BoolExpr::disj(std::move(parts));
            }
        }
        return BoolExpr::constant(true);
    }

    // Expands one effect entry under `sub`, appending (prop, sign) pairs in
    // enumeration order so that a later entry overrides an earlier one.
    void ground_effect(const EffectTemplate& e, Subst& sub, size_t binder,
                       std::vector<std::pair<int, bool>>& out) const {
        if (binder == e.binders.size()) {
            out.emplace_back(resolve_atom(e.atom, sub), e.positive);
            return;
        }
        const std::string& v = e.binders[binder];
        auto saved =
            sub.find(v) != sub.end() ? std::optional<std::string>(sub[v]) : std::nullopt;
        for (const auto& obj : domain) {
            sub[v] = obj;
            ground_effect(e, sub, binder + 1, out);
        }
        if (saved)
            sub[v] = *saved;
        else
            sub.erase(v);
    }
};

// Enumerates substitutions: the first parameter ranges over the agents, the
// rest over every object.
template <typename Fn>
void for_each_instance(const std::vector<std::string>& params,
                       const std::vector<std::string>& agents,
                       const std::vector<std::string>& domain, Fn&& fn) {
    std::vector<std::string> args(params.size());
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == params.size()) {
            Subst sub;
            for (size_t j = 0; j < params.size(); ++j) sub[params[j]] = args[j];
            fn(sub, args);
            return;
        }
        const auto& range = i == 0 ? agents : domain;
        for (const auto& obj : range) {
            args[i] = obj;
            rec(i + 1);
        }
    };
    rec(0);
}

}  // namespace

int AtomTable::find(const std::string& name) const {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) return -1;
    return static_cast<int>(it - names.begin());
}

std::vector<std::string> Policy::all_objects() const {
    std::vector<std::string> all = objects;
    all.insert(all.end(), agents.begin(), agents.end());
    std::sort(all.begin(), all.end());
    return all;
}

Policy ground(const ParsedPolicy& parsed, const GroundOptions& opt) {
    if (parsed.agents.empty()) throw Error("policy declares no agents");

    Policy pol;
    pol.predicates = parsed.predicates;
    pol.objects = parsed.objects;
    pol.agents = parsed.agents;

    // Policy propositions: every ground atom, ordered lexicographically by
    // predicate name and then argument names. The index is the stable bit
    // position used everywhere downstream.
    std::vector<std::string> domain = pol.all_objects();
    std::vector<PredicateDecl> sorted_preds = parsed.predicates;
    std::sort(sorted_preds.begin(), sorted_preds.end(),
              [](const PredicateDecl& a, const PredicateDecl& b) { return a.name < b.name; });
    for (const auto& pred : sorted_preds) {
        std::vector<std::string> args(static_cast<size_t>(pred.arity));
        std::function<void(int)> rec = [&](int i) {
            if (i == pred.arity) {
                pol.atoms.names.push_back(atom_name(pred.name, args));
                return;
            }
            for (const auto& obj : domain) {
                args[static_cast<size_t>(i)] = obj;
                rec(i + 1);
            }
        };
        rec(0);
    }

    GroundCtx ctx{parsed, pol.atoms, domain};

    for (const auto& rule : parsed.actions) {
        for_each_instance(
            rule.params, parsed.agents, domain,
            [&](Subst& sub, const std::vector<std::string>& args) {
                if (pol.actions.size() >= opt.max_actions)
                    throw CapacityError("grounding exceeds the configured action bound (" +
                                        std::to_string(opt.max_actions) + ")");
                GroundAction ga;
                ga.id = atom_name(rule.id, args);
                ga.agent = static_cast<int>(
                    std::find(pol.agents.begin(), pol.agents.end(), args[0]) -
                    pol.agents.begin());
                std::vector<std::pair<int, bool>> seq;
                for (const auto& e : rule.effects) ctx.ground_effect(e, sub, 0, seq);
                // An atom signed more than once keeps only its last sign.
                std::map<int, bool> signs;
                for (const auto& [prop, sign] : seq) signs[prop] = sign;
                ga.effect.assign(signs.begin(), signs.end());
                ga.guard = ctx.ground_formula(rule.guard, sub);
                pol.actions.push_back(std::move(ga));
            });
    }

    for (const auto& rule : parsed.reads) {
        for_each_instance(rule.params, parsed.agents, domain,
                          [&](Subst& sub, const std::vector<std::string>& args) {
                              GroundReadPermission gr;
                              gr.id = atom_name(rule.id, args);
                              gr.agent = static_cast<int>(
                                  std::find(pol.agents.begin(), pol.agents.end(), args[0]) -
                                  pol.agents.begin());
                              gr.target = ctx.resolve_atom(rule.target, sub);
                              gr.guard = ctx.ground_formula(rule.guard, sub);
                              pol.reads.push_back(std::move(gr));
                          });
    }

    return pol;
}

}  // namespace acv::policy
