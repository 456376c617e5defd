#pragma once

#include <string>
#include <vector>

#include "acv/boolexpr.hpp"
#include "acv/ctlk.hpp"
#include "acv/policy_ast.hpp"
#include "acv/universe.hpp"

namespace acv::policy {

// A verification query: a propositional description of the initial states
// and the property to check over them.
struct Query {
    logic::BoolExpr init;
    logic::Ctlk property;
    // Atoms written explicitly in the initial formula (macro expansions
    // excluded); used to seed the initial abstraction.
    std::vector<int> init_atoms;
};

// Query files hold optional `def name := <propositional formula>` lines
// followed by one `init : property` query. Two macros may appear as
// top-level conjuncts of the initial formula: @closedworld (all policy
// propositions not mentioned elsewhere in the formula are false) and
// @loc_closed (local copies of unreadable propositions are false).
Query parse_query(const std::string& source, const kernel::Universe& u, const Policy& pol);

// Variant for systems that are not policy-derived: atoms resolve against the
// full proposition table by name, and the local-bit syntax is unavailable.
Query parse_query_raw(const std::string& source, const kernel::Universe& u);

}  // namespace acv::policy
