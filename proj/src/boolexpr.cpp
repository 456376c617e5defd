#include "acv/boolexpr.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace acv::logic {

BoolExpr BoolExpr::constant(bool v) {
    static const auto t = std::make_shared<const Node>(Node{BoolOp::True, -1, {}});
    static const auto f = std::make_shared<const Node>(Node{BoolOp::False, -1, {}});
    return BoolExpr(v ? t : f);
}

BoolExpr BoolExpr::var(int id) {
    return BoolExpr(std::make_shared<const Node>(Node{BoolOp::Var, id, {}}));
}

BoolExpr BoolExpr::lit(int id, bool positive) {
    return positive ? var(id) : negate(var(id));
}

BoolExpr BoolExpr::negate(BoolExpr e) {
    if (e.is_true()) return constant(false);
    if (e.is_false()) return constant(true);
    if (e.op() == BoolOp::Not) return e.kids()[0];
    return BoolExpr(std::make_shared<const Node>(Node{BoolOp::Not, -1, {std::move(e)}}));
}

BoolExpr BoolExpr::conj(std::vector<BoolExpr> kids) {
    std::vector<BoolExpr> flat;
    for (auto& k : kids) {
        if (k.is_false()) return constant(false);
        if (k.is_true()) continue;
        if (k.op() == BoolOp::And) {
            for (const auto& g : k.kids()) flat.push_back(g);
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (flat.empty()) return constant(true);
    if (flat.size() == 1) return flat[0];
    return BoolExpr(std::make_shared<const Node>(Node{BoolOp::And, -1, std::move(flat)}));
}

BoolExpr BoolExpr::disj(std::vector<BoolExpr> kids) {
    std::vector<BoolExpr> flat;
    for (auto& k : kids) {
        if (k.is_true()) return constant(true);
        if (k.is_false()) continue;
        if (k.op() == BoolOp::Or) {
            for (const auto& g : k.kids()) flat.push_back(g);
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (flat.empty()) return constant(false);
    if (flat.size() == 1) return flat[0];
    return BoolExpr(std::make_shared<const Node>(Node{BoolOp::Or, -1, std::move(flat)}));
}

BoolExpr BoolExpr::implies(BoolExpr a, BoolExpr b) {
    if (a.is_true()) return b;
    if (a.is_false()) return constant(true);
    if (b.is_true()) return constant(true);
    if (b.is_false()) return negate(std::move(a));
    return BoolExpr(
        std::make_shared<const Node>(Node{BoolOp::Implies, -1, {std::move(a), std::move(b)}}));
}

bool BoolExpr::is_literal() const {
    return op() == BoolOp::Var || (op() == BoolOp::Not && kids()[0].op() == BoolOp::Var);
}

bool BoolExpr::eval(const std::function<bool(int)>& val) const {
    switch (op()) {
        case BoolOp::True: return true;
        case BoolOp::False: return false;
        case BoolOp::Var: return val(var_id());
        case BoolOp::Not: return !kids()[0].eval(val);
        case BoolOp::And:
            for (const auto& k : kids())
                if (!k.eval(val)) return false;
            return true;
        case BoolOp::Or:
            for (const auto& k : kids())
                if (k.eval(val)) return true;
            return false;
        case BoolOp::Implies: return !kids()[0].eval(val) || kids()[1].eval(val);
    }
    return false;
}

bool BoolExpr::eval(const BitVec& state) const {
    return eval([&state](int v) { return state.get(v); });
}

void BoolExpr::collect_vars(std::set<int>& out) const {
    if (op() == BoolOp::Var) {
        out.insert(var_id());
        return;
    }
    for (const auto& k : kids()) k.collect_vars(out);
}

std::vector<int> BoolExpr::vars() const {
    std::set<int> s;
    collect_vars(s);
    return {s.begin(), s.end()};
}

BoolExpr BoolExpr::restrict(const std::map<int, bool>& binding) const {
    switch (op()) {
        case BoolOp::True:
        case BoolOp::False: return *this;
        case BoolOp::Var: {
            auto it = binding.find(var_id());
            return it == binding.end() ? *this : constant(it->second);
        }
        case BoolOp::Not: return negate(kids()[0].restrict(binding));
        case BoolOp::And: {
            std::vector<BoolExpr> ks;
            ks.reserve(kids().size());
            for (const auto& k : kids()) ks.push_back(k.restrict(binding));
            return conj(std::move(ks));
        }
        case BoolOp::Or: {
            std::vector<BoolExpr> ks;
            ks.reserve(kids().size());
            for (const auto& k : kids()) ks.push_back(k.restrict(binding));
            return disj(std::move(ks));
        }
        case BoolOp::Implies:
            return implies(kids()[0].restrict(binding), kids()[1].restrict(binding));
    }
    return *this;
}

BoolExpr BoolExpr::rename(const std::function<int(int)>& f) const {
    switch (op()) {
        case BoolOp::True:
        case BoolOp::False: return *this;
        case BoolOp::Var: return var(f(var_id()));
        case BoolOp::Not: return negate(kids()[0].rename(f));
        case BoolOp::And:
        case BoolOp::Or: {
            std::vector<BoolExpr> ks;
            ks.reserve(kids().size());
            for (const auto& k : kids()) ks.push_back(k.rename(f));
            return op() == BoolOp::And ? conj(std::move(ks)) : disj(std::move(ks));
        }
        case BoolOp::Implies: return implies(kids()[0].rename(f), kids()[1].rename(f));
    }
    return *this;
}

bool BoolExpr::equal(const BoolExpr& a, const BoolExpr& b) {
    if (a.n_ == b.n_) return true;
    if (a.op() != b.op() || a.var_id() != b.var_id()) return false;
    if (a.kids().size() != b.kids().size()) return false;
    for (size_t i = 0; i < a.kids().size(); ++i)
        if (!equal(a.kids()[i], b.kids()[i])) return false;
    return true;
}

std::string BoolExpr::to_string(const std::function<std::string(int)>& name) const {
    switch (op()) {
        case BoolOp::True: return "true";
        case BoolOp::False: return "false";
        case BoolOp::Var: return name(var_id());
        case BoolOp::Not: {
            const auto& k = kids()[0];
            if (k.op() == BoolOp::Var || k.is_true() || k.is_false())
                return "~" + k.to_string(name);
            return "~(" + k.to_string(name) + ")";
        }
        case BoolOp::And:
        case BoolOp::Or: {
            std::string sep = op() == BoolOp::And ? " & " : " | ";
            std::string s = "(";
            for (size_t i = 0; i < kids().size(); ++i) {
                if (i) s += sep;
                s += kids()[i].to_string(name);
            }
            return s + ")";
        }
        case BoolOp::Implies:
            return "(" + kids()[0].to_string(name) + " -> " + kids()[1].to_string(name) + ")";
    }
    return "?";
}

std::string BoolExpr::to_string() const {
    return to_string([](int v) { return "v" + std::to_string(v); });
}

namespace {

// Negation normal form over {lit, and, or}.
BoolExpr to_nnf(const BoolExpr& e, bool neg) {
    switch (e.op()) {
        case BoolOp::True: return BoolExpr::constant(!neg);
        case BoolOp::False: return BoolExpr::constant(neg);
        case BoolOp::Var: return BoolExpr::lit(e.var_id(), !neg);
        case BoolOp::Not: return to_nnf(e.kids()[0], !neg);
        case BoolOp::And:
        case BoolOp::Or: {
            bool conj_like = (e.op() == BoolOp::And) != neg;
            std::vector<BoolExpr> ks;
            ks.reserve(e.kids().size());
            for (const auto& k : e.kids()) ks.push_back(to_nnf(k, neg));
            return conj_like ? BoolExpr::conj(std::move(ks)) : BoolExpr::disj(std::move(ks));
        }
        case BoolOp::Implies: {
            // a -> b == ~a | b
            BoolExpr a = to_nnf(e.kids()[0], !neg);
            BoolExpr b = to_nnf(e.kids()[1], neg);
            return neg ? BoolExpr::conj({std::move(a), std::move(b)})
                       : BoolExpr::disj({std::move(a), std::move(b)});
        }
    }
    return e;
}

std::optional<Clause> normalize_clause(Clause c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (size_t i = 0; i + 1 < c.size(); ++i)
        if (c[i].var == c[i + 1].var) return std::nullopt;  // tautology
    return c;
}

// Clause sets for an NNF formula, capped.
bool cnf_rec(const BoolExpr& e, size_t max_clauses, std::vector<Clause>& out) {
    switch (e.op()) {
        case BoolOp::True: out.clear(); return true;
        case BoolOp::False: out = {Clause{}}; return true;
        case BoolOp::Var: out = {Clause{{e.var_id(), true}}}; return true;
        case BoolOp::Not: out = {Clause{{e.kids()[0].var_id(), false}}}; return true;
        case BoolOp::And: {
            out.clear();
            for (const auto& k : e.kids()) {
                std::vector<Clause> sub;
                if (!cnf_rec(k, max_clauses, sub)) return false;
                out.insert(out.end(), sub.begin(), sub.end());
                if (out.size() > max_clauses) return false;
            }
            return true;
        }
        case BoolOp::Or: {
            out = {Clause{}};
            for (const auto& k : e.kids()) {
                std::vector<Clause> sub;
                if (!cnf_rec(k, max_clauses, sub)) return false;
                std::vector<Clause> next;
                for (const auto& a : out) {
                    for (const auto& b : sub) {
                        Clause c = a;
                        c.insert(c.end(), b.begin(), b.end());
                        if (auto n = normalize_clause(std::move(c))) next.push_back(*n);
                        if (next.size() > max_clauses) return false;
                    }
                }
                out = std::move(next);
            }
            return true;
        }
        default: return false;  // NNF has no Implies
    }
}

}  // namespace

std::optional<std::vector<Clause>> to_cnf(const BoolExpr& e, size_t max_clauses) {
    std::vector<Clause> out;
    if (!cnf_rec(to_nnf(e, false), max_clauses, out)) return std::nullopt;
    for (auto& c : out) {
        auto n = normalize_clause(std::move(c));
        c = n ? *n : Clause{};
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BoolExpr clause_to_expr(const Clause& c) {
    std::vector<BoolExpr> lits;
    lits.reserve(c.size());
    for (const auto& l : c) lits.push_back(BoolExpr::lit(l.var, l.positive));
    return BoolExpr::disj(std::move(lits));
}

BoolExpr exists_quantify(const BoolExpr& e, const std::set<int>& hidden) {
    BoolExpr r = e;
    for (int v : e.vars()) {
        if (!hidden.count(v)) continue;
        r = BoolExpr::disj({r.restrict({{v, true}}), r.restrict({{v, false}})});
    }
    return r;
}

std::vector<bool> truth_table(const BoolExpr& e, const std::vector<int>& support) {
    if (support.size() > 24) throw std::runtime_error("truth table support too large");
    size_t rows = size_t{1} << support.size();
    std::vector<bool> out(rows);
    for (size_t row = 0; row < rows; ++row) {
        out[row] = e.eval([&](int v) {
            auto it = std::lower_bound(support.begin(), support.end(), v);
            if (it == support.end() || *it != v) return false;
            size_t j = static_cast<size_t>(it - support.begin());
            return ((row >> j) & 1) != 0;
        });
    }
    return out;
}

bool equivalent(const BoolExpr& a, const BoolExpr& b, int max_support) {
    std::set<int> s;
    a.collect_vars(s);
    b.collect_vars(s);
    if (static_cast<int>(s.size()) > max_support)
        throw std::runtime_error("equivalence check support too large");
    std::vector<int> support(s.begin(), s.end());
    return truth_table(a, support) == truth_table(b, support);
}

bool satisfiable(const BoolExpr& e, int max_support) {
    if (e.is_true()) return true;
    if (e.is_false()) return false;
    std::vector<int> support = e.vars();
    if (static_cast<int>(support.size()) > max_support)
        throw std::runtime_error("satisfiability check support too large");
    auto tt = truth_table(e, support);
    return std::find(tt.begin(), tt.end(), true) != tt.end();
}

void split_conjuncts(const BoolExpr& e, std::vector<Literal>& lits,
                     std::vector<BoolExpr>& rest) {
    if (e.op() == BoolOp::And) {
        for (const auto& k : e.kids()) split_conjuncts(k, lits, rest);
    } else if (e.op() == BoolOp::Var) {
        lits.push_back({e.var_id(), true});
    } else if (e.op() == BoolOp::Not && e.kids()[0].op() == BoolOp::Var) {
        lits.push_back({e.kids()[0].var_id(), false});
    } else if (!e.is_true()) {
        rest.push_back(e);
    }
}

BoolExpr cubes_formula(const std::vector<BitVec>& states, const std::vector<int>& support) {
    if (states.empty()) return BoolExpr::constant(false);
    // Cube: one tri-state value per support position (0, 1, or don't-care).
    enum : char { F = 0, T = 1, X = 2 };
    std::set<std::vector<char>> cubes;
    for (const auto& s : states) {
        std::vector<char> c(support.size());
        for (size_t i = 0; i < support.size(); ++i) c[i] = s.get(support[i]) ? T : F;
        cubes.insert(std::move(c));
    }
    // Merge pairs differing in exactly one non-X position.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::vector<char>> v(cubes.begin(), cubes.end());
        for (size_t i = 0; i < v.size() && !changed; ++i) {
            for (size_t j = i + 1; j < v.size() && !changed; ++j) {
                int diff = -1;
                bool mergeable = true;
                for (size_t k = 0; k < v[i].size(); ++k) {
                    if (v[i][k] == v[j][k]) continue;
                    if (v[i][k] == X || v[j][k] == X || diff >= 0) {
                        mergeable = false;
                        break;
                    }
                    diff = static_cast<int>(k);
                }
                if (mergeable && diff >= 0) {
                    auto merged = v[i];
                    merged[static_cast<size_t>(diff)] = X;
                    cubes.erase(v[i]);
                    cubes.erase(v[j]);
                    cubes.insert(std::move(merged));
                    changed = true;
                }
            }
        }
    }
    std::vector<BoolExpr> ds;
    for (const auto& c : cubes) {
        std::vector<BoolExpr> conj;
        for (size_t k = 0; k < c.size(); ++k)
            if (c[k] != X) conj.push_back(BoolExpr::lit(support[k], c[k] == T));
        ds.push_back(BoolExpr::conj(std::move(conj)));
    }
    return BoolExpr::disj(std::move(ds));
}

}  // namespace acv::logic
