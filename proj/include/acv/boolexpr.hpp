#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acv/bitvec.hpp"

namespace acv::logic {

enum class BoolOp { True, False, Var, Not, And, Or, Implies };

// Immutable propositional formula over integer proposition ids.
// Handles are cheap to copy; nodes are shared.
class BoolExpr {
public:
    BoolExpr() : BoolExpr(constant(true)) {}

    static BoolExpr constant(bool v);
    static BoolExpr var(int id);
    static BoolExpr lit(int id, bool positive);
    static BoolExpr negate(BoolExpr e);
    static BoolExpr conj(std::vector<BoolExpr> kids);
    static BoolExpr disj(std::vector<BoolExpr> kids);
    static BoolExpr implies(BoolExpr a, BoolExpr b);

    BoolOp op() const { return n_->op; }
    int var_id() const { return n_->var; }
    const std::vector<BoolExpr>& kids() const { return n_->kids; }

    bool is_true() const { return n_->op == BoolOp::True; }
    bool is_false() const { return n_->op == BoolOp::False; }
    bool is_literal() const;

    bool eval(const std::function<bool(int)>& val) const;
    bool eval(const BitVec& state) const;

    void collect_vars(std::set<int>& out) const;
    std::vector<int> vars() const;

    // Substitutes constants for the given variables and folds. Variables not
    // in the map are left alone.
    BoolExpr restrict(const std::map<int, bool>& binding) const;

    // Remaps variable ids (used when projecting onto a narrower universe).
    BoolExpr rename(const std::function<int(int)>& f) const;

    bool operator==(const BoolExpr& o) const { return n_ == o.n_ || equal(*this, o); }

    std::string to_string(const std::function<std::string(int)>& name) const;
    std::string to_string() const;

private:
    struct Node {
        BoolOp op;
        int var = -1;
        std::vector<BoolExpr> kids;
    };
    explicit BoolExpr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    static bool equal(const BoolExpr& a, const BoolExpr& b);

    std::shared_ptr<const Node> n_;
};

// Clause literal: proposition id with sign.
struct Literal {
    int var;
    bool positive;
    bool operator==(const Literal& o) const = default;
    bool operator<(const Literal& o) const {
        return var != o.var ? var < o.var : positive < o.positive;
    }
};
using Clause = std::vector<Literal>;  // disjunction, sorted, no duplicates

// Distribution-based CNF (no auxiliary variables, so every clause speaks the
// original vocabulary). Returns nullopt if the clause count would exceed
// `max_clauses`. Tautological clauses are dropped; clauses are deduplicated
// and sorted for determinism.
std::optional<std::vector<Clause>> to_cnf(const BoolExpr& e, size_t max_clauses);

BoolExpr clause_to_expr(const Clause& c);

// Existential quantification by cofactor expansion: drops every variable in
// `hidden` via f[1/x] | f[0/x], folding as it goes.
BoolExpr exists_quantify(const BoolExpr& e, const std::set<int>& hidden);

// Truth table of `e` over the given (sorted) support. Bit i of the result
// corresponds to the assignment whose bit j equals (i >> j) & 1.
std::vector<bool> truth_table(const BoolExpr& e, const std::vector<int>& support);

// Semantic equivalence over the union of the two supports. Intended for
// desk-scale formulas; throws if the joint support exceeds `max_support`.
bool equivalent(const BoolExpr& a, const BoolExpr& b, int max_support = 20);

bool satisfiable(const BoolExpr& e, int max_support = 24);

// If the formula is a conjunction (possibly nested) of literals and other
// subformulas, returns the literal conjuncts and the residual non-literal
// conjuncts separately.
void split_conjuncts(const BoolExpr& e, std::vector<Literal>& lits,
                     std::vector<BoolExpr>& rest);

// Disjunction-of-cubes formula describing exactly the given valuations,
// restricted to `support` (which must include every bit on which the set is
// not constant relative to the intended context). Cubes are merged pairwise
// while any two differ in a single literal.
BoolExpr cubes_formula(const std::vector<BitVec>& states, const std::vector<int>& support);

}  // namespace acv::logic
