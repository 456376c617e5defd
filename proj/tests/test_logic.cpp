#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "acv/boolexpr.hpp"
#include "acv/ctlk.hpp"
#include "support/generators.hpp"

using namespace acv;
using logic::BitVec;
using logic::BoolExpr;
using logic::Ctlk;
using logic::CtlkOp;

TEST_CASE("bitvec basics") {
    BitVec v(5);
    v.set(1, true);
    v.set(4, true);
    CHECK(v.to_string() == "01001");
    CHECK(BitVec::from_string("01001") == v);
    CHECK(v.get(1));
    CHECK_FALSE(v.get(0));
    CHECK(BitVec::from_string("00") < BitVec::from_string("01"));
    CHECK(BitVec::from_string("011") < BitVec::from_string("100"));
    CHECK(logic::gather(v, {4, 1, 0}) == BitVec::from_string("110"));
}

TEST_CASE("constant folding in builders") {
    BoolExpr t = BoolExpr::constant(true);
    BoolExpr p = BoolExpr::var(0);
    CHECK(BoolExpr::conj({p, BoolExpr::negate(t)}).is_false());
    CHECK(BoolExpr::disj({p, t}).is_true());
    CHECK(BoolExpr::negate(BoolExpr::negate(p)) == p);
    CHECK(BoolExpr::implies(t, p) == p);
}

TEST_CASE("restrict substitutes and folds") {
    // (v0 & ~v1) | v2
    BoolExpr f = BoolExpr::disj(
        {BoolExpr::conj({BoolExpr::var(0), BoolExpr::negate(BoolExpr::var(1))}),
         BoolExpr::var(2)});
    CHECK(f.restrict({{2, true}}).is_true());
    BoolExpr g = f.restrict({{2, false}, {1, false}});
    CHECK(g == BoolExpr::var(0));
}

TEST_CASE("cnf conversion preserves meaning") {
    testing::Rng rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        BoolExpr f = testing::random_bool(rng, 5, 3);
        auto cnf = logic::to_cnf(f, 10000);
        REQUIRE(cnf.has_value());
        std::vector<BoolExpr> clauses;
        for (const auto& c : *cnf) clauses.push_back(logic::clause_to_expr(c));
        BoolExpr g = BoolExpr::conj(std::move(clauses));
        CHECK(logic::equivalent(f, g));
    }
}

TEST_CASE("existential quantification by cofactors") {
    BoolExpr x = BoolExpr::var(0), p = BoolExpr::var(1);
    CHECK(logic::equivalent(logic::exists_quantify(BoolExpr::conj({x, p}), {0}), p));
    CHECK(logic::exists_quantify(BoolExpr::conj({x, BoolExpr::negate(x)}), {0}).is_false());

    // Projection oracle: the quantified truth table is the or-projection of
    // the original one.
    testing::Rng rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        int width = 4 + testing::pick(rng, 0, 4);
        BoolExpr f = testing::random_bool(rng, width, 3);
        int hidden_var = testing::pick(rng, 0, width - 1);
        BoolExpr q = logic::exists_quantify(f, {hidden_var});
        for (uint64_t bits = 0; bits < (uint64_t{1} << width); ++bits) {
            BitVec s(width);
            for (int i = 0; i < width; ++i) s.set(i, (bits >> i) & 1);
            bool expect = f.eval(s.with(hidden_var, false)) || f.eval(s.with(hidden_var, true));
            CHECK(q.eval(s) == expect);
        }
    }
}

TEST_CASE("cube formulas describe their sets exactly") {
    testing::Rng rng(3);
    int width = 5;
    std::vector<int> support;
    for (int i = 0; i < width; ++i) support.push_back(i);
    for (int iter = 0; iter < 50; ++iter) {
        std::set<BitVec> set;
        int n = testing::pick(rng, 0, 10);
        for (int i = 0; i < n; ++i) {
            BitVec s(width);
            for (int b = 0; b < width; ++b) s.set(b, testing::pick(rng, 0, 1));
            set.insert(s);
        }
        BoolExpr f = logic::cubes_formula({set.begin(), set.end()}, support);
        for (uint64_t bits = 0; bits < (uint64_t{1} << width); ++bits) {
            BitVec s(width);
            for (int b = 0; b < width; ++b) s.set(b, (bits >> b) & 1);
            CHECK(f.eval(s) == (set.count(s) > 0));
        }
    }
}

TEST_CASE("actlk recognizer") {
    Ctlk p = Ctlk::atom(0), q = Ctlk::atom(1);
    CHECK(logic::is_actlk(Ctlk::unary(CtlkOp::AG, Ctlk::negate(p))));
    CHECK(logic::is_actlk(Ctlk::unary(
        CtlkOp::AG, Ctlk::implies(p, Ctlk::disj(Ctlk::knows(1, p), Ctlk::unary(CtlkOp::AG, q))))));
    // ~K is outside the fragment, E operators as well.
    CHECK_FALSE(logic::is_actlk(
        Ctlk::unary(CtlkOp::AG, Ctlk::implies(p, Ctlk::negate(Ctlk::knows(1, q))))));
    CHECK_FALSE(logic::is_actlk(Ctlk::unary(CtlkOp::EG, p)));
    // A negated E operator flips to a universal one.
    CHECK(logic::is_actlk(Ctlk::negate(Ctlk::unary(CtlkOp::EF, Ctlk::negate(p)))));
    CHECK(logic::is_actlk(Ctlk::binary(CtlkOp::AR, Ctlk::negate(p), q)));
}

TEST_CASE("positive negated K detection") {
    Ctlk p = Ctlk::atom(0), q = Ctlk::atom(1);
    Ctlk f = Ctlk::unary(CtlkOp::AG, Ctlk::implies(p, Ctlk::negate(Ctlk::knows(1, q))));
    CHECK(logic::has_positive_negated_k(f));
    CHECK(logic::in_counterexample_fragment(f));
    Ctlk g = Ctlk::unary(CtlkOp::AG, Ctlk::implies(p, Ctlk::knows(1, q)));
    CHECK_FALSE(logic::has_positive_negated_k(g));
    // K on the left of an implication is a negative occurrence.
    Ctlk h = Ctlk::unary(CtlkOp::AG, Ctlk::implies(Ctlk::knows(1, q), p));
    CHECK(logic::has_positive_negated_k(h));
}

TEST_CASE("counterexample fragment") {
    Ctlk p = Ctlk::atom(0), q = Ctlk::atom(1);
    CHECK(logic::in_counterexample_fragment(
        Ctlk::unary(CtlkOp::AG, Ctlk::implies(p, Ctlk::disj(Ctlk::knows(1, p),
                                                            Ctlk::unary(CtlkOp::AG, q))))));
    CHECK_FALSE(logic::in_counterexample_fragment(Ctlk::unary(CtlkOp::AF, p)));
    CHECK_FALSE(
        logic::in_counterexample_fragment(Ctlk::knows(1, Ctlk::unary(CtlkOp::AG, p))));
}

TEST_CASE("normalization uses the adequate connectives") {
    testing::Rng rng(5);
    kernel::System sys = testing::random_system(rng);
    for (int iter = 0; iter < 50; ++iter) {
        Ctlk f = testing::random_ctlk(rng, sys, 3);
        std::function<void(const Ctlk&)> walk = [&](const Ctlk& g) {
            switch (g.op()) {
                case CtlkOp::AX:
                case CtlkOp::AG:
                case CtlkOp::AF:
                case CtlkOp::AU:
                case CtlkOp::AR:
                case CtlkOp::EF:
                case CtlkOp::Implies:
                case CtlkOp::And: FAIL("derived connective survived normalization"); break;
                default: break;
            }
            for (const auto& k : g.kids()) walk(k);
        };
        walk(f.normalize());
    }
}
