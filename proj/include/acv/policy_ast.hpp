#pragma once

#include <string>
#include <vector>

#include "acv/boolexpr.hpp"

namespace acv::policy {

struct SourcePos {
    int line = 0;
    int col = 0;
};

struct PredicateDecl {
    std::string name;
    int arity = 0;
    SourcePos pos;
};

// A term in a rule body: a bound variable or an object constant.
struct Term {
    bool is_var = false;
    std::string name;
    SourcePos pos;
};

struct AtomTemplate {
    int pred = -1;  // index into ParsedPolicy::predicates
    std::vector<Term> args;
    SourcePos pos;
};

enum class TfOp { True, False, Atom, Not, And, Or, Implies, Forall, Exists };

// Guard formula before grounding: atoms over terms, with quantifiers.
struct TemplateFormula {
    TfOp op = TfOp::True;
    AtomTemplate atom;          // when op == Atom
    std::string bound;          // when op == Forall/Exists
    std::vector<TemplateFormula> kids;
    SourcePos pos;
};

// One entry of an action effect: an optionally universally bound signed atom.
struct EffectTemplate {
    std::vector<std::string> binders;  // nested "forall v." prefixes, outermost first
    bool positive = true;
    AtomTemplate atom;
    SourcePos pos;
};

struct ActionRule {
    std::string id;
    std::vector<std::string> params;  // first parameter is the acting agent
    std::vector<EffectTemplate> effects;
    TemplateFormula guard;
    SourcePos pos;
};

struct ReadRule {
    std::string id;
    std::vector<std::string> params;  // first parameter is the reading agent
    AtomTemplate target;
    TemplateFormula guard;
    SourcePos pos;
};

// Result of parsing a policy file, before grounding.
struct ParsedPolicy {
    std::vector<PredicateDecl> predicates;
    std::vector<std::string> objects;  // plain objects
    std::vector<std::string> agents;   // objects marked as agents
    std::vector<ActionRule> actions;
    std::vector<ReadRule> reads;
};

ParsedPolicy parse_policy(const std::string& source);
std::string print_policy(const ParsedPolicy& p);

// ── Grounded policy ─────────────────────────────────────────────────────────

// Table of every ground atom over the declared predicates and objects, in
// lexicographic (predicate name, argument names) order. Index doubles as the
// proposition id used by guards.
struct AtomTable {
    std::vector<std::string> names;
    int find(const std::string& name) const;  // -1 when absent
};

struct GroundAction {
    std::string id;                              // rule name + argument tuple
    int agent = -1;                              // index into Policy::agents
    std::vector<std::pair<int, bool>> effect;    // (policy prop, sign), sorted by prop
    logic::BoolExpr guard;                       // over policy props
};

struct GroundReadPermission {
    std::string id;
    int agent = -1;
    int target = -1;      // policy prop
    logic::BoolExpr guard;
};

struct Policy {
    std::vector<PredicateDecl> predicates;
    std::vector<std::string> objects;  // plain objects
    std::vector<std::string> agents;   // agent objects
    AtomTable atoms;                   // policy propositions
    std::vector<GroundAction> actions;
    std::vector<GroundReadPermission> reads;

    // All objects (plain then agents), the domain quantifiers range over.
    std::vector<std::string> all_objects() const;
};

struct GroundOptions {
    size_t max_actions = 100000;
};

Policy ground(const ParsedPolicy& parsed, const GroundOptions& opt = {});

}  // namespace acv::policy
