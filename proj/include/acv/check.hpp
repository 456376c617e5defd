#pragma once

#include <unordered_map>
#include <vector>

#include "acv/ctlk.hpp"
#include "acv/reach.hpp"

namespace acv::mc {

using Bits = std::vector<uint8_t>;  // characteristic vector over reachable ids

// Fixpoint-based satisfaction sets over the reachable fragment. EX runs over
// the predecessor relation, EG is a greatest fixpoint, EU a least fixpoint,
// and K(i, _) holds in a state exactly when every state of the same agent-i
// block satisfies the operand. Derived connectives are evaluated through the
// adequate set. Results are memoized per formula node.
class Evaluator {
public:
    Evaluator(const kernel::System& sys, const ReachIndex& reach)
        : sys_(sys), reach_(reach) {}

    const Bits& sat(const logic::Ctlk& f);
    bool state_sat(const logic::Ctlk& f, int state_id);

    // Holds iff every initial state satisfies the formula. Vacuously true
    // over an empty initial set.
    bool holds(const logic::Ctlk& f);

    const kernel::System& system() const { return sys_; }
    const ReachIndex& reach() const { return reach_; }

private:
    Bits compute(const logic::Ctlk& f);
    Bits sat_ex(const Bits& a) const;
    Bits sat_eg(const Bits& a) const;
    Bits sat_eu(const Bits& a, const Bits& b) const;

    const kernel::System& sys_;
    const ReachIndex& reach_;
    std::unordered_map<const void*, Bits> memo_;
};

struct CheckResult {
    bool holds;
    Bits sat;  // of the checked formula, over reachable ids
};

CheckResult check(const kernel::System& sys, const ReachIndex& reach, const logic::Ctlk& f);

}  // namespace acv::mc
