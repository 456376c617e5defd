#include "acv/check.hpp"

#include <deque>

#include "acv/error.hpp"

namespace acv::mc {

using logic::Ctlk;
using logic::CtlkOp;

namespace {

Bits bits_not(const Bits& a) {
    Bits r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = !a[i];
    return r;
}

Bits bits_and(const Bits& a, const Bits& b) {
    Bits r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] && b[i];
    return r;
}

Bits bits_or(const Bits& a, const Bits& b) {
    Bits r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] || b[i];
    return r;
}

}  // namespace

Bits Evaluator::sat_ex(const Bits& a) const {
    Bits r(a.size(), 0);
    for (size_t s = 0; s < a.size(); ++s) {
        if (!a[s]) continue;
        for (const auto& [act, from] : reach_.preds[s]) r[static_cast<size_t>(from)] = 1;
    }
    return r;
}

Bits Evaluator::sat_eg(const Bits& a) const {
    // Greatest fixpoint: the largest X inside sat(a) whose every member has a
    // successor in X.
    Bits x = a;
    std::vector<int> live(a.size(), 0);
    std::deque<int> kill;
    for (size_t s = 0; s < a.size(); ++s) {
        if (!x[s]) continue;
        int n = 0;
        for (const auto& [act, to] : reach_.succs[s])
            if (x[static_cast<size_t>(to)]) ++n;
        live[s] = n;
        if (n == 0) kill.push_back(static_cast<int>(s));
    }
    while (!kill.empty()) {
        int s = kill.front();
        kill.pop_front();
        if (!x[static_cast<size_t>(s)]) continue;
        x[static_cast<size_t>(s)] = 0;
        for (const auto& [act, from] : reach_.preds[static_cast<size_t>(s)]) {
            if (!x[static_cast<size_t>(from)]) continue;
            if (--live[static_cast<size_t>(from)] == 0) kill.push_back(from);
        }
    }
    return x;
}

Bits Evaluator::sat_eu(const Bits& a, const Bits& b) const {
    // Least fixpoint: b states, grown backwards through a states.
    Bits x = b;
    std::deque<int> work;
    for (size_t s = 0; s < b.size(); ++s)
        if (b[s]) work.push_back(static_cast<int>(s));
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        for (const auto& [act, from] : reach_.preds[static_cast<size_t>(s)]) {
            size_t f = static_cast<size_t>(from);
            if (x[f] || !a[f]) continue;
            x[f] = 1;
            work.push_back(from);
        }
    }
    return x;
}

Bits Evaluator::compute(const Ctlk& f) {
    size_t n = reach_.size();
    switch (f.op()) {
        case CtlkOp::True: return Bits(n, 1);
        case CtlkOp::False: return Bits(n, 0);
        case CtlkOp::Atom: {
            if (f.prop() < 0 || f.prop() >= sys_.width())
                throw Error("formula references an unknown proposition");
            Bits r(n);
            for (size_t i = 0; i < n; ++i) r[i] = reach_.states[i].get(f.prop());
            return r;
        }
        case CtlkOp::Not: return bits_not(sat(f.kids()[0]));
        case CtlkOp::And: return bits_and(sat(f.kids()[0]), sat(f.kids()[1]));
        case CtlkOp::Or: return bits_or(sat(f.kids()[0]), sat(f.kids()[1]));
        case CtlkOp::Implies: return bits_or(bits_not(sat(f.kids()[0])), sat(f.kids()[1]));
        case CtlkOp::K: {
            int ag = f.agent();
            if (ag < 0 || ag >= static_cast<int>(sys_.universe.agents.size()))
                throw Error("knowledge operator references an unknown agent");
            const Bits& a = sat(f.kids()[0]);
            Bits r(n, 0);
            for (const auto& block : reach_.blocks[static_cast<size_t>(ag)]) {
                bool all = true;
                for (int s : block)
                    if (!a[static_cast<size_t>(s)]) {
                        all = false;
                        break;
                    }
                if (all)
                    for (int s : block) r[static_cast<size_t>(s)] = 1;
            }
            return r;
        }
        case CtlkOp::EX: return sat_ex(sat(f.kids()[0]));
        case CtlkOp::EG: return sat_eg(sat(f.kids()[0]));
        case CtlkOp::EU: return sat_eu(sat(f.kids()[0]), sat(f.kids()[1]));
        case CtlkOp::AX: return bits_not(sat_ex(bits_not(sat(f.kids()[0]))));
        case CtlkOp::AG: {
            // AG a == ~E(true U ~a)
            return bits_not(sat_eu(Bits(n, 1), bits_not(sat(f.kids()[0]))));
        }
        case CtlkOp::AF: return bits_not(sat_eg(bits_not(sat(f.kids()[0]))));
        case CtlkOp::EF: return sat_eu(Bits(n, 1), sat(f.kids()[0]));
        case CtlkOp::AU: {
            // A(a U b) == ~(E(~b U (~a & ~b)) | EG ~b)
            Bits na = bits_not(sat(f.kids()[0]));
            Bits nb = bits_not(sat(f.kids()[1]));
            return bits_not(bits_or(sat_eu(nb, bits_and(na, nb)), sat_eg(nb)));
        }
        case CtlkOp::AR: {
            // A(a R b) == ~E(~a U ~b)
            Bits na = bits_not(sat(f.kids()[0]));
            Bits nb = bits_not(sat(f.kids()[1]));
            return bits_not(sat_eu(na, nb));
        }
    }
    return Bits(n, 0);
}

const Bits& Evaluator::sat(const Ctlk& f) {
    auto it = memo_.find(f.key());
    if (it != memo_.end()) return it->second;
    Bits b = compute(f);
    return memo_.emplace(f.key(), std::move(b)).first->second;
}

bool Evaluator::state_sat(const Ctlk& f, int state_id) {
    return sat(f)[static_cast<size_t>(state_id)] != 0;
}

bool Evaluator::holds(const Ctlk& f) {
    const Bits& s = sat(f);
    for (const auto& s0 : sys_.initial) {
        int id = reach_.id_of(s0);
        if (id < 0 || !s[static_cast<size_t>(id)]) return false;
    }
    return true;
}

CheckResult check(const kernel::System& sys, const ReachIndex& reach, const Ctlk& f) {
    Evaluator ev(sys, reach);
    CheckResult r;
    r.sat = ev.sat(f);
    r.holds = ev.holds(f);
    return r;
}

}  // namespace acv::mc
