#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acv/boolexpr.hpp"

namespace acv::logic {

// Branching-time temporal logic with a per-agent knowledge modality.
// EX, EG and EU are the adequate connectives; the rest are derived and kept
// in the tree so the original shape of a property stays visible.
enum class CtlkOp {
    Atom, True, False,
    Not, And, Or, Implies,
    K,            // K(agent, phi)
    EX, EG, EU,   // adequate set
    AX, AG, AF, AU, AR, EF,
};

class Ctlk {
public:
    Ctlk() : Ctlk(constant(true)) {}

    static Ctlk atom(int prop);
    static Ctlk constant(bool v);
    static Ctlk negate(Ctlk a);
    static Ctlk conj(Ctlk a, Ctlk b);
    static Ctlk disj(Ctlk a, Ctlk b);
    static Ctlk implies(Ctlk a, Ctlk b);
    static Ctlk knows(int agent, Ctlk a);
    static Ctlk unary(CtlkOp op, Ctlk a);             // EX/EG/AX/AG/AF/EF
    static Ctlk binary(CtlkOp op, Ctlk a, Ctlk b);    // EU/AU/AR

    CtlkOp op() const { return n_->op; }
    int prop() const { return n_->prop; }
    int agent() const { return n_->agent; }
    const std::vector<Ctlk>& kids() const { return n_->kids; }
    const void* key() const { return n_.get(); }  // identity for memo tables

    bool operator==(const Ctlk& o) const;

    void collect_atoms(std::set<int>& out) const;
    std::vector<int> atoms() const;
    void collect_k_agents(std::set<int>& out) const;

    Ctlk rename_atoms(const std::function<int(int)>& f) const;

    bool is_propositional() const;
    // Valid only when is_propositional().
    BoolExpr to_bool_expr() const;

    // Rewrites every derived connective into the adequate set
    // {atom, not, or, K, EX, EG, EU}.
    Ctlk normalize() const;

    std::string to_string(const std::function<std::string(int)>& prop_name,
                          const std::function<std::string(int)>& agent_name) const;

private:
    struct Node {
        CtlkOp op;
        int prop = -1;
        int agent = -1;
        std::vector<Ctlk> kids;
    };
    explicit Ctlk(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

// The universally-quantified fragment preserved by over-approximation:
// formulas whose negation-normal form uses only literals, conjunction,
// disjunction, positive K, and universal path operators.
bool is_actlk(const Ctlk& f);

// True when the formula additionally contains a positive ~K subformula
// (allowed for interactive verification when the K operand is
// propositional).
bool has_positive_negated_k(const Ctlk& f);

// Restrictions required for counterexample extraction: AG/AX as the only
// temporal operators, arbitrary propositional structure, and K (positively
// or under one negation) applied to propositional operands only.
bool in_counterexample_fragment(const Ctlk& f);

}  // namespace acv::logic
