#include "support/generators.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace acv::testing {

using logic::BitVec;
using logic::BoolExpr;
using logic::Ctlk;
using logic::CtlkOp;

BoolExpr random_bool(Rng& rng, int width, int depth) {
    if (width == 0) return BoolExpr::constant(pick(rng, 0, 1));
    if (depth <= 0 || pick(rng, 0, 3) == 0)
        return BoolExpr::lit(pick(rng, 0, width - 1), pick(rng, 0, 1));
    switch (pick(rng, 0, 3)) {
        case 0: return BoolExpr::negate(random_bool(rng, width, depth - 1));
        case 1:
            return BoolExpr::conj(
                {random_bool(rng, width, depth - 1), random_bool(rng, width, depth - 1)});
        case 2:
            return BoolExpr::disj(
                {random_bool(rng, width, depth - 1), random_bool(rng, width, depth - 1)});
        default:
            return BoolExpr::implies(random_bool(rng, width, depth - 1),
                                     random_bool(rng, width, depth - 1));
    }
}

kernel::System random_system(Rng& rng, int max_props, int max_actions) {
    kernel::System sys;
    kernel::Universe& u = sys.universe;
    int n_agents = pick(rng, 1, 2);
    int env_props = pick(rng, 1, std::min(3, max_props - n_agents));
    int budget = max_props - env_props;

    u.agents.push_back("e");
    for (int p = 0; p < env_props; ++p)
        u.props.push_back({"e" + std::to_string(p), 0, kernel::PropKind::Policy, -1});
    u.span.emplace_back(0, env_props);
    for (int a = 1; a <= n_agents; ++a) {
        std::string name(1, static_cast<char>('a' + a - 1));
        u.agents.push_back(name);
        int k = pick(rng, 1, std::max(1, std::min(2, budget / (n_agents - a + 1))));
        budget -= k;
        int begin = static_cast<int>(u.props.size());
        for (int p = 0; p < k; ++p)
            u.props.push_back({name + std::to_string(p), a, kernel::PropKind::Policy, -1});
        u.span.emplace_back(begin, static_cast<int>(u.props.size()));
    }
    int width = u.width();

    int n_actions = pick(rng, 2, max_actions);
    for (int i = 0; i < n_actions; ++i) {
        kernel::Action a;
        a.id = "t" + std::to_string(i);
        a.agent = pick(rng, 0, n_agents);
        int k = pick(rng, 1, std::min(3, width));
        std::set<int> touched;
        while (static_cast<int>(touched.size()) < k) touched.insert(pick(rng, 0, width - 1));
        for (int p : touched) a.effect.emplace_back(p, pick(rng, 0, 1));
        a.guard = random_bool(rng, width, 2);
        sys.actions.push_back(std::move(a));
    }

    int n_init = pick(rng, 1, 3);
    std::set<BitVec> inits;
    while (static_cast<int>(inits.size()) < n_init) {
        BitVec s(width);
        for (int p = 0; p < width; ++p) s.set(p, pick(rng, 0, 1));
        inits.insert(s);
    }
    sys.initial.assign(inits.begin(), inits.end());
    return sys;
}

Ctlk random_ctlk(Rng& rng, const kernel::System& sys, int depth) {
    int width = sys.universe.width();
    if (depth <= 0 || pick(rng, 0, 4) == 0)
        return Ctlk::atom(pick(rng, 0, width - 1));
    switch (pick(rng, 0, 10)) {
        case 0: return Ctlk::negate(random_ctlk(rng, sys, depth - 1));
        case 1:
            return Ctlk::conj(random_ctlk(rng, sys, depth - 1),
                              random_ctlk(rng, sys, depth - 1));
        case 2:
            return Ctlk::disj(random_ctlk(rng, sys, depth - 1),
                              random_ctlk(rng, sys, depth - 1));
        case 3: {
            int agent = pick(rng, 1, static_cast<int>(sys.universe.agents.size()) - 1);
            return Ctlk::knows(agent, random_ctlk(rng, sys, depth - 1));
        }
        case 4: return Ctlk::unary(CtlkOp::EX, random_ctlk(rng, sys, depth - 1));
        case 5: return Ctlk::unary(CtlkOp::EG, random_ctlk(rng, sys, depth - 1));
        case 6:
            return Ctlk::binary(CtlkOp::EU, random_ctlk(rng, sys, depth - 1),
                                random_ctlk(rng, sys, depth - 1));
        case 7: return Ctlk::unary(CtlkOp::AG, random_ctlk(rng, sys, depth - 1));
        case 8: return Ctlk::unary(CtlkOp::AX, random_ctlk(rng, sys, depth - 1));
        case 9: return Ctlk::unary(CtlkOp::AF, random_ctlk(rng, sys, depth - 1));
        default:
            return Ctlk::binary(CtlkOp::AU, random_ctlk(rng, sys, depth - 1),
                                random_ctlk(rng, sys, depth - 1));
    }
}

namespace {

Ctlk random_prop_over(Rng& rng, const std::vector<int>& atoms, int depth) {
    if (depth <= 0 || pick(rng, 0, 2) == 0) {
        Ctlk a = Ctlk::atom(atoms[static_cast<size_t>(pick(rng, 0, static_cast<int>(atoms.size()) - 1))]);
        return pick(rng, 0, 1) ? a : Ctlk::negate(a);
    }
    Ctlk l = random_prop_over(rng, atoms, depth - 1);
    Ctlk r = random_prop_over(rng, atoms, depth - 1);
    return pick(rng, 0, 1) ? Ctlk::conj(std::move(l), std::move(r))
                           : Ctlk::disj(std::move(l), std::move(r));
}

}  // namespace

Ctlk random_safety(Rng& rng, const kernel::System& sys, const std::vector<int>& atoms,
                   int depth) {
    if (depth <= 0 || pick(rng, 0, 3) == 0) return random_prop_over(rng, atoms, 1);
    switch (pick(rng, 0, 4)) {
        case 0:
            return Ctlk::conj(random_safety(rng, sys, atoms, depth - 1),
                              random_safety(rng, sys, atoms, depth - 1));
        case 1:
            return Ctlk::disj(random_safety(rng, sys, atoms, depth - 1),
                              random_safety(rng, sys, atoms, depth - 1));
        case 2: {
            int agent = pick(rng, 1, static_cast<int>(sys.universe.agents.size()) - 1);
            return Ctlk::knows(agent, random_prop_over(rng, atoms, depth - 1));
        }
        case 3: return Ctlk::unary(CtlkOp::AX, random_safety(rng, sys, atoms, depth - 1));
        default: return Ctlk::unary(CtlkOp::AG, random_safety(rng, sys, atoms, depth - 1));
    }
}

namespace {

std::string random_guard_text(Rng& rng, const std::vector<std::string>& preds, int depth) {
    if (preds.empty()) return "true";
    if (depth <= 0 || pick(rng, 0, 2) == 0) {
        const std::string& p = preds[static_cast<size_t>(
            pick(rng, 0, static_cast<int>(preds.size()) - 1))];
        return pick(rng, 0, 1) ? p : "~" + p;
    }
    std::string l = random_guard_text(rng, preds, depth - 1);
    std::string r = random_guard_text(rng, preds, depth - 1);
    return "(" + l + (pick(rng, 0, 1) ? " & " : " | ") + r + ")";
}

}  // namespace

std::string random_micro_policy(Rng& rng) {
    int n_props = pick(rng, 1, 3);
    std::vector<std::string> preds;
    for (int i = 0; i < n_props; ++i) preds.push_back(std::string(1, static_cast<char>('p' + i)));

    std::ostringstream os;
    os << "predicates:\n";
    for (const auto& p : preds) os << "  " << p << "/0\n";
    os << "objects:\nagents:\n  a b\nactions:\n";
    int n_actions = pick(rng, 1, 3);
    for (int i = 0; i < n_actions; ++i) {
        os << "  act" << i << "(x): {";
        int k = pick(rng, 1, n_props);
        std::set<int> used;
        while (static_cast<int>(used.size()) < k) used.insert(pick(rng, 0, n_props - 1));
        bool first = true;
        for (int p : used) {
            if (!first) os << ", ";
            os << (pick(rng, 0, 1) ? "+" : "-") << preds[static_cast<size_t>(p)];
            first = false;
        }
        os << "} <- " << random_guard_text(rng, preds, 2) << "\n";
    }
    os << "reads:\n";
    int n_reads = pick(rng, 0, 2);
    for (int i = 0; i < n_reads; ++i) {
        os << "  see" << i << "(x): " << preds[static_cast<size_t>(pick(rng, 0, n_props - 1))]
           << " <- " << random_guard_text(rng, preds, 1) << "\n";
    }
    return os.str();
}

}  // namespace acv::testing
