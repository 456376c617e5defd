#include "acv/ctlk.hpp"

#include <cassert>
#include <stdexcept>

namespace acv::logic {

Ctlk Ctlk::atom(int prop) {
    return Ctlk(std::make_shared<const Node>(Node{CtlkOp::Atom, prop, -1, {}}));
}

Ctlk Ctlk::constant(bool v) {
    return Ctlk(std::make_shared<const Node>(Node{v ? CtlkOp::True : CtlkOp::False, -1, -1, {}}));
}

Ctlk Ctlk::negate(Ctlk a) {
    return Ctlk(std::make_shared<const Node>(Node{CtlkOp::Not, -1, -1, {std::move(a)}}));
}

Ctlk Ctlk::conj(Ctlk a, Ctlk b) {
    return Ctlk(std::make_shared<const Node>(Node{CtlkOp::And, -1, -1, {std::move(a), std::move(b)}}));
}

Ctlk Ctlk::disj(Ctlk a, Ctlk b) {
    return Ctlk(std::make_shared<const Node>(Node{CtlkOp::Or, -1, -1, {std::move(a), std::move(b)}}));
}

Ctlk Ctlk::implies(Ctlk a, Ctlk b) {
    return Ctlk(std::make_shared<const Node>(Node{CtlkOp::Implies, -1, -1, {std::move(a), std::move(b)}}));
}

Ctlk Ctlk::knows(int agent, Ctlk a) {
    return Ctlk(std::make_shared<const Node>(Node{CtlkOp::K, -1, agent, {std::move(a)}}));
}

Ctlk Ctlk::unary(CtlkOp op, Ctlk a) {
    assert(op == CtlkOp::EX || op == CtlkOp::EG || op == CtlkOp::AX || op == CtlkOp::AG ||
           op == CtlkOp::AF || op == CtlkOp::EF);
    return Ctlk(std::make_shared<const Node>(Node{op, -1, -1, {std::move(a)}}));
}

Ctlk Ctlk::binary(CtlkOp op, Ctlk a, Ctlk b) {
    assert(op == CtlkOp::EU || op == CtlkOp::AU || op == CtlkOp::AR);
    return Ctlk(std::make_shared<const Node>(Node{op, -1, -1, {std::move(a), std::move(b)}}));
}

bool Ctlk::operator==(const Ctlk& o) const {
    if (n_ == o.n_) return true;
    if (op() != o.op() || prop() != o.prop() || agent() != o.agent()) return false;
    if (kids().size() != o.kids().size()) return false;
    for (size_t i = 0; i < kids().size(); ++i)
        if (!(kids()[i] == o.kids()[i])) return false;
    return true;
}

void Ctlk::collect_atoms(std::set<int>& out) const {
    if (op() == CtlkOp::Atom) {
        out.insert(prop());
        return;
    }
    for (const auto& k : kids()) k.collect_atoms(out);
}

std::vector<int> Ctlk::atoms() const {
    std::set<int> s;
    collect_atoms(s);
    return {s.begin(), s.end()};
}

void Ctlk::collect_k_agents(std::set<int>& out) const {
    if (op() == CtlkOp::K) out.insert(agent());
    for (const auto& k : kids()) k.collect_k_agents(out);
}

Ctlk Ctlk::rename_atoms(const std::function<int(int)>& f) const {
    if (op() == CtlkOp::Atom) return atom(f(prop()));
    if (kids().empty()) return *this;
    auto n = std::make_shared<Node>(*n_);
    for (auto& k : n->kids) k = k.rename_atoms(f);
    return Ctlk(std::shared_ptr<const Node>(std::move(n)));
}

bool Ctlk::is_propositional() const {
    switch (op()) {
        case CtlkOp::Atom:
        case CtlkOp::True:
        case CtlkOp::False: return true;
        case CtlkOp::Not:
        case CtlkOp::And:
        case CtlkOp::Or:
        case CtlkOp::Implies:
            for (const auto& k : kids())
                if (!k.is_propositional()) return false;
            return true;
        default: return false;
    }
}

BoolExpr Ctlk::to_bool_expr() const {
    switch (op()) {
        case CtlkOp::Atom: return BoolExpr::var(prop());
        case CtlkOp::True: return BoolExpr::constant(true);
        case CtlkOp::False: return BoolExpr::constant(false);
        case CtlkOp::Not: return BoolExpr::negate(kids()[0].to_bool_expr());
        case CtlkOp::And: return BoolExpr::conj({kids()[0].to_bool_expr(), kids()[1].to_bool_expr()});
        case CtlkOp::Or: return BoolExpr::disj({kids()[0].to_bool_expr(), kids()[1].to_bool_expr()});
        case CtlkOp::Implies:
            return BoolExpr::implies(kids()[0].to_bool_expr(), kids()[1].to_bool_expr());
        default: throw std::logic_error("not a propositional formula");
    }
}

Ctlk Ctlk::normalize() const {
    switch (op()) {
        case CtlkOp::Atom:
        case CtlkOp::True:
        case CtlkOp::False: return *this;
        case CtlkOp::Not: return negate(kids()[0].normalize());
        case CtlkOp::And:
            // a & b == ~(~a | ~b)
            return negate(disj(negate(kids()[0].normalize()), negate(kids()[1].normalize())));
        case CtlkOp::Or: return disj(kids()[0].normalize(), kids()[1].normalize());
        case CtlkOp::Implies: return disj(negate(kids()[0].normalize()), kids()[1].normalize());
        case CtlkOp::K: return knows(agent(), kids()[0].normalize());
        case CtlkOp::EX:
        case CtlkOp::EG: return unary(op(), kids()[0].normalize());
        case CtlkOp::EU: return binary(CtlkOp::EU, kids()[0].normalize(), kids()[1].normalize());
        case CtlkOp::AX: return negate(unary(CtlkOp::EX, negate(kids()[0].normalize())));
        case CtlkOp::AG: {
            // AG a == ~E(true U ~a)
            Ctlk a = kids()[0].normalize();
            return negate(binary(CtlkOp::EU, constant(true), negate(std::move(a))));
        }
        case CtlkOp::AF: return negate(unary(CtlkOp::EG, negate(kids()[0].normalize())));
        case CtlkOp::EF: return binary(CtlkOp::EU, constant(true), kids()[0].normalize());
        case CtlkOp::AU: {
            // A(a U b) == ~(E(~b U (~a & ~b)) | EG ~b)
            Ctlk a = kids()[0].normalize(), b = kids()[1].normalize();
            Ctlk nb = negate(b);
            Ctlk left = binary(CtlkOp::EU, nb, negate(disj(a, b)));
            return negate(disj(std::move(left), unary(CtlkOp::EG, nb)));
        }
        case CtlkOp::AR: {
            // A(a R b) == ~E(~a U ~b)
            Ctlk a = kids()[0].normalize(), b = kids()[1].normalize();
            return negate(binary(CtlkOp::EU, negate(std::move(a)), negate(std::move(b))));
        }
    }
    return *this;
}

std::string Ctlk::to_string(const std::function<std::string(int)>& prop_name,
                            const std::function<std::string(int)>& agent_name) const {
    auto rec = [&](const Ctlk& f) { return f.to_string(prop_name, agent_name); };
    switch (op()) {
        case CtlkOp::Atom: return prop_name(prop());
        case CtlkOp::True: return "true";
        case CtlkOp::False: return "false";
        case CtlkOp::Not: return "~(" + rec(kids()[0]) + ")";
        case CtlkOp::And: return "(" + rec(kids()[0]) + " & " + rec(kids()[1]) + ")";
        case CtlkOp::Or: return "(" + rec(kids()[0]) + " | " + rec(kids()[1]) + ")";
        case CtlkOp::Implies: return "(" + rec(kids()[0]) + " -> " + rec(kids()[1]) + ")";
        case CtlkOp::K: return "K(" + agent_name(agent()) + ", " + rec(kids()[0]) + ")";
        case CtlkOp::EX: return "EX(" + rec(kids()[0]) + ")";
        case CtlkOp::EG: return "EG(" + rec(kids()[0]) + ")";
        case CtlkOp::EF: return "EF(" + rec(kids()[0]) + ")";
        case CtlkOp::AX: return "AX(" + rec(kids()[0]) + ")";
        case CtlkOp::AG: return "AG(" + rec(kids()[0]) + ")";
        case CtlkOp::AF: return "AF(" + rec(kids()[0]) + ")";
        case CtlkOp::EU: return "E(" + rec(kids()[0]) + " U " + rec(kids()[1]) + ")";
        case CtlkOp::AU: return "A(" + rec(kids()[0]) + " U " + rec(kids()[1]) + ")";
        case CtlkOp::AR: return "A(" + rec(kids()[0]) + " R " + rec(kids()[1]) + ")";
    }
    return "?";
}

namespace {

// `neg` tracks whether we sit under an odd number of negations.
bool actlk_rec(const Ctlk& f, bool neg) {
    switch (f.op()) {
        case CtlkOp::Atom:
        case CtlkOp::True:
        case CtlkOp::False: return true;
        case CtlkOp::Not: return actlk_rec(f.kids()[0], !neg);
        case CtlkOp::And:
        case CtlkOp::Or: return actlk_rec(f.kids()[0], neg) && actlk_rec(f.kids()[1], neg);
        case CtlkOp::Implies:
            return actlk_rec(f.kids()[0], !neg) && actlk_rec(f.kids()[1], neg);
        case CtlkOp::K: return !neg && actlk_rec(f.kids()[0], false);
        case CtlkOp::AX:
        case CtlkOp::AG:
        case CtlkOp::AF:
        case CtlkOp::AU:
        case CtlkOp::AR:
            if (neg) return false;
            for (const auto& k : f.kids())
                if (!actlk_rec(k, false)) return false;
            return true;
        case CtlkOp::EX:
        case CtlkOp::EG:
        case CtlkOp::EF:
        case CtlkOp::EU:
            if (!neg) return false;
            // ~EX a == AX ~a, ~EG a == AF ~a, ~EF a == AG ~a,
            // ~E(a U b) == A(~a R ~b)
            for (const auto& k : f.kids())
                if (!actlk_rec(k, true)) return false;
            return true;
    }
    return false;
}

bool neg_k_rec(const Ctlk& f, bool neg) {
    if (f.op() == CtlkOp::K && neg) return f.kids()[0].is_propositional();
    switch (f.op()) {
        case CtlkOp::Not: return neg_k_rec(f.kids()[0], !neg);
        case CtlkOp::Implies:
            return neg_k_rec(f.kids()[0], !neg) || neg_k_rec(f.kids()[1], neg);
        default:
            for (const auto& k : f.kids())
                if (neg_k_rec(k, neg)) return true;
            return false;
    }
}

bool ce_fragment_rec(const Ctlk& f) {
    if (f.is_propositional()) return true;
    switch (f.op()) {
        case CtlkOp::And:
        case CtlkOp::Or:
            return ce_fragment_rec(f.kids()[0]) && ce_fragment_rec(f.kids()[1]);
        case CtlkOp::Implies:
            // Antecedents act negatively; keep them propositional.
            return f.kids()[0].is_propositional() && ce_fragment_rec(f.kids()[1]);
        case CtlkOp::Not:
            // Only ~K(a, prop) is allowed beyond propositional negation.
            return f.kids()[0].op() == CtlkOp::K && f.kids()[0].kids()[0].is_propositional();
        case CtlkOp::K: return f.kids()[0].is_propositional();
        case CtlkOp::AG:
        case CtlkOp::AX: return ce_fragment_rec(f.kids()[0]);
        default: return false;
    }
}

}  // namespace

bool is_actlk(const Ctlk& f) { return actlk_rec(f, false); }

bool has_positive_negated_k(const Ctlk& f) { return neg_k_rec(f, false); }

bool in_counterexample_fragment(const Ctlk& f) { return ce_fragment_rec(f); }

}  // namespace acv::logic
