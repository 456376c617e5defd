#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "acv/policy_ast.hpp"
#include "lexer.hpp"

namespace acv::policy {

using detail::Tok;
using detail::Token;
using detail::TokenStream;

namespace {

const char* kSections[] = {"predicates", "objects", "agents", "actions", "reads"};

class PolicyParser {
public:
    explicit PolicyParser(const std::string& src) : ts_(src) {}

    ParsedPolicy parse() {
        section("predicates");
        while (ts_.at(Tok::Ident) && !at_section_header()) parse_pred_decl();
        section("objects");
        while (ts_.at(Tok::Ident) && !at_section_header()) declare_object(false);
        section("agents");
        while (ts_.at(Tok::Ident) && !at_section_header()) declare_object(true);
        section("actions");
        while (ts_.at(Tok::Ident) && !at_section_header()) parse_action_rule();
        section("reads");
        while (ts_.at(Tok::Ident) && !at_section_header()) parse_read_rule();
        ts_.expect(Tok::End, "end of file");
        return std::move(p_);
    }

private:
    bool at_section_header() const {
        if (!ts_.at(Tok::Ident)) return false;
        for (const char* s : kSections)
            if (ts_.peek().text == s) return true;
        return false;
    }

    void section(const std::string& name) {
        Token t = ts_.expect(Tok::Ident, "section '" + name + ":'");
        if (t.text != name)
            throw Error("expected section '" + name + ":', found '" + t.text + "'", t.line, t.col);
        ts_.expect(Tok::Colon, "':'");
    }

    void parse_pred_decl() {
        Token name = ts_.take();
        ts_.expect(Tok::Slash, "'/' and an arity");
        Token ar = ts_.expect(Tok::Ident, "arity");
        int arity;
        try {
            size_t used = 0;
            arity = std::stoi(ar.text, &used);
            if (used != ar.text.size() || arity < 0) throw std::invalid_argument("");
        } catch (...) {
            throw Error("arity must be a non-negative integer", ar.line, ar.col);
        }
        for (const auto& d : p_.predicates)
            if (d.name == name.text)
                throw Error("duplicate predicate '" + name.text + "'", name.line, name.col);
        p_.predicates.push_back({name.text, arity, {name.line, name.col}});
    }

    void declare_object(bool agent) {
        Token t = ts_.take();
        for (const auto& o : p_.objects)
            if (o == t.text) throw Error("duplicate object '" + t.text + "'", t.line, t.col);
        for (const auto& o : p_.agents)
            if (o == t.text) throw Error("duplicate object '" + t.text + "'", t.line, t.col);
        (agent ? p_.agents : p_.objects).push_back(t.text);
    }

    int find_predicate(const Token& t) const {
        for (size_t i = 0; i < p_.predicates.size(); ++i)
            if (p_.predicates[i].name == t.text) return static_cast<int>(i);
        throw Error("unknown predicate '" + t.text + "'", t.line, t.col);
    }

    bool known_object(const std::string& n) const {
        return std::find(p_.objects.begin(), p_.objects.end(), n) != p_.objects.end() ||
               std::find(p_.agents.begin(), p_.agents.end(), n) != p_.agents.end();
    }

    Term make_term(const Token& t) const {
        bool is_var = std::find(scope_.begin(), scope_.end(), t.text) != scope_.end();
        if (!is_var && !known_object(t.text))
            throw Error("'" + t.text + "' is neither a bound variable nor a declared object",
                        t.line, t.col);
        return Term{is_var, t.text, {t.line, t.col}};
    }

    AtomTemplate parse_atom(const Token& name) {
        AtomTemplate a;
        a.pred = find_predicate(name);
        a.pos = {name.line, name.col};
        if (ts_.at(Tok::LParen)) {
            ts_.take();
            if (!ts_.at(Tok::RParen)) {
                a.args.push_back(make_term(ts_.expect(Tok::Ident, "term")));
                while (ts_.at(Tok::Comma)) {
                    ts_.take();
                    a.args.push_back(make_term(ts_.expect(Tok::Ident, "term")));
                }
            }
            ts_.expect(Tok::RParen, "')'");
        }
        int arity = p_.predicates[static_cast<size_t>(a.pred)].arity;
        if (static_cast<int>(a.args.size()) != arity)
            throw Error("predicate '" + name.text + "' expects " + std::to_string(arity) +
                            " argument(s), got " + std::to_string(a.args.size()),
                        name.line, name.col);
        return a;
    }

    // formula := or_expr ('->' formula)?   (right associative)
    TemplateFormula parse_formula() {
        TemplateFormula lhs = parse_or();
        if (ts_.at(Tok::Arrow)) {
            Token t = ts_.take();
            TemplateFormula rhs = parse_formula();
            TemplateFormula f;
            f.op = TfOp::Implies;
            f.pos = {t.line, t.col};
            f.kids = {std::move(lhs), std::move(rhs)};
            return f;
        }
        return lhs;
    }

    TemplateFormula parse_or() {
        TemplateFormula f = parse_and();
        while (ts_.at(Tok::Pipe)) {
            Token t = ts_.take();
            TemplateFormula g;
            g.op = TfOp::Or;
            g.pos = {t.line, t.col};
            g.kids = {std::move(f), parse_and()};
            f = std::move(g);
        }
        return f;
    }

    TemplateFormula parse_and() {
        TemplateFormula f = parse_unary();
        while (ts_.at(Tok::Amp)) {
            Token t = ts_.take();
            TemplateFormula g;
            g.op = TfOp::And;
            g.pos = {t.line, t.col};
            g.kids = {std::move(f), parse_unary()};
            f = std::move(g);
        }
        return f;
    }

    TemplateFormula parse_unary() {
        Token t = ts_.peek();
        if (ts_.at(Tok::Tilde)) {
            ts_.take();
            TemplateFormula f;
            f.op = TfOp::Not;
            f.pos = {t.line, t.col};
            f.kids = {parse_unary()};
            return f;
        }
        if (ts_.at(Tok::LParen)) {
            ts_.take();
            TemplateFormula f = parse_formula();
            ts_.expect(Tok::RParen, "')'");
            return f;
        }
        if (ts_.at(Tok::Ident)) {
            if (t.text == "true" || t.text == "false") {
                ts_.take();
                TemplateFormula f;
                f.op = t.text == "true" ? TfOp::True : TfOp::False;
                f.pos = {t.line, t.col};
                return f;
            }
            if (t.text == "forall" || t.text == "exists") {
                ts_.take();
                Token v = ts_.expect(Tok::Ident, "quantified variable");
                ts_.expect(Tok::Dot, "'.'");
                ts_.expect(Tok::LBracket, "'[' around the quantifier body");
                scope_.push_back(v.text);
                TemplateFormula body = parse_formula();
                scope_.pop_back();
                ts_.expect(Tok::RBracket, "']'");
                TemplateFormula f;
                f.op = t.text == "forall" ? TfOp::Forall : TfOp::Exists;
                f.bound = v.text;
                f.pos = {t.line, t.col};
                f.kids = {std::move(body)};
                return f;
            }
            Token name = ts_.take();
            TemplateFormula f;
            f.op = TfOp::Atom;
            f.atom = parse_atom(name);
            f.pos = {name.line, name.col};
            return f;
        }
        throw Error("expected a formula, found '" + t.text + "'", t.line, t.col);
    }

    std::vector<std::string> parse_params(const Token& rule) {
        std::vector<std::string> params;
        ts_.expect(Tok::LParen, "'('");
        params.push_back(ts_.expect(Tok::Ident, "parameter").text);
        while (ts_.at(Tok::Comma)) {
            ts_.take();
            params.push_back(ts_.expect(Tok::Ident, "parameter").text);
        }
        ts_.expect(Tok::RParen, "')'");
        std::set<std::string> seen(params.begin(), params.end());
        if (seen.size() != params.size())
            throw Error("rule '" + rule.text + "' repeats a parameter", rule.line, rule.col);
        return params;
    }

    void collect_free_vars(const TemplateFormula& f, std::vector<std::string> bound,
                           std::set<std::string>& out) const {
        if (f.op == TfOp::Atom) {
            for (const auto& t : f.atom.args)
                if (t.is_var &&
                    std::find(bound.begin(), bound.end(), t.name) == bound.end())
                    out.insert(t.name);
            return;
        }
        if (f.op == TfOp::Forall || f.op == TfOp::Exists) bound.push_back(f.bound);
        for (const auto& k : f.kids) collect_free_vars(k, bound, out);
    }

    void check_free_vars(const Token& rule, const std::vector<std::string>& params,
                         const std::set<std::string>& fv) const {
        for (const auto& v : fv)
            if (std::find(params.begin(), params.end(), v) == params.end())
                throw Error("rule '" + rule.text + "' uses free variable '" + v +
                                "' outside its parameter list",
                            rule.line, rule.col);
    }

    void parse_action_rule() {
        Token name = ts_.take();
        ActionRule r;
        r.id = name.text;
        r.pos = {name.line, name.col};
        r.params = parse_params(name);
        ts_.expect(Tok::Colon, "':'");
        scope_ = r.params;
        ts_.expect(Tok::LBrace, "'{'");
        if (!ts_.at(Tok::RBrace)) {
            r.effects.push_back(parse_effect());
            while (ts_.at(Tok::Comma)) {
                ts_.take();
                r.effects.push_back(parse_effect());
            }
        }
        ts_.expect(Tok::RBrace, "'}'");
        ts_.expect(Tok::LArrow, "'<-'");
        r.guard = parse_formula();
        scope_.clear();

        std::set<std::string> fv;
        collect_free_vars(r.guard, {}, fv);
        for (const auto& e : r.effects)
            for (const auto& t : e.atom.args)
                if (t.is_var && std::find(e.binders.begin(), e.binders.end(), t.name) ==
                                    e.binders.end())
                    fv.insert(t.name);
        check_free_vars(name, r.params, fv);
        p_.actions.push_back(std::move(r));
    }

    EffectTemplate parse_effect() {
        EffectTemplate e;
        while (ts_.at_ident("forall")) {
            ts_.take();
            Token v = ts_.expect(Tok::Ident, "quantified variable");
            ts_.expect(Tok::Dot, "'.'");
            e.binders.push_back(v.text);
            scope_.push_back(v.text);
        }
        Token sign = ts_.take();
        if (sign.kind == Tok::Plus)
            e.positive = true;
        else if (sign.kind == Tok::Minus)
            e.positive = false;
        else
            throw Error("expected '+' or '-' before an effect atom", sign.line, sign.col);
        Token name = ts_.expect(Tok::Ident, "predicate");
        e.atom = parse_atom(name);
        e.pos = {sign.line, sign.col};
        for (size_t i = 0; i < e.binders.size(); ++i) scope_.pop_back();
        return e;
    }

    void parse_read_rule() {
        Token name = ts_.take();
        ReadRule r;
        r.id = name.text;
        r.pos = {name.line, name.col};
        r.params = parse_params(name);
        ts_.expect(Tok::Colon, "':'");
        scope_ = r.params;
        Token target = ts_.expect(Tok::Ident, "target atom");
        r.target = parse_atom(target);
        ts_.expect(Tok::LArrow, "'<-'");
        r.guard = parse_formula();
        scope_.clear();

        std::set<std::string> fv;
        collect_free_vars(r.guard, {}, fv);
        for (const auto& t : r.target.args)
            if (t.is_var) fv.insert(t.name);
        check_free_vars(name, r.params, fv);
        p_.reads.push_back(std::move(r));
    }

    TokenStream ts_;
    ParsedPolicy p_;
    std::vector<std::string> scope_;
};

void print_atom(std::ostream& os, const ParsedPolicy& p, const AtomTemplate& a) {
    os << p.predicates[static_cast<size_t>(a.pred)].name;
    if (!a.args.empty()) {
        os << "(";
        for (size_t i = 0; i < a.args.size(); ++i) {
            if (i) os << ",";
            os << a.args[i].name;
        }
        os << ")";
    }
}

void print_formula(std::ostream& os, const ParsedPolicy& p, const TemplateFormula& f) {
    switch (f.op) {
        case TfOp::True: os << "true"; break;
        case TfOp::False: os << "false"; break;
        case TfOp::Atom: print_atom(os, p, f.atom); break;
        case TfOp::Not:
            os << "~(";
            print_formula(os, p, f.kids[0]);
            os << ")";
            break;
        case TfOp::And:
        case TfOp::Or:
        case TfOp::Implies: {
            const char* sep = f.op == TfOp::And ? " & " : f.op == TfOp::Or ? " | " : " -> ";
            os << "(";
            print_formula(os, p, f.kids[0]);
            os << sep;
            print_formula(os, p, f.kids[1]);
            os << ")";
            break;
        }
        case TfOp::Forall:
        case TfOp::Exists:
            os << (f.op == TfOp::Forall ? "forall " : "exists ") << f.bound << ". [";
            print_formula(os, p, f.kids[0]);
            os << "]";
            break;
    }
}

}  // namespace

ParsedPolicy parse_policy(const std::string& source) { return PolicyParser(source).parse(); }

std::string print_policy(const ParsedPolicy& p) {
    std::ostringstream os;
    os << "predicates:\n";
    for (const auto& d : p.predicates) os << "  " << d.name << "/" << d.arity << "\n";
    os << "objects:\n";
    for (const auto& o : p.objects) os << "  " << o << "\n";
    os << "agents:\n";
    for (const auto& a : p.agents) os << "  " << a << "\n";
    os << "actions:\n";
    for (const auto& r : p.actions) {
        os << "  " << r.id << "(";
        for (size_t i = 0; i < r.params.size(); ++i) {
            if (i) os << ",";
            os << r.params[i];
        }
        os << "): {";
        for (size_t i = 0; i < r.effects.size(); ++i) {
            if (i) os << ", ";
            for (const auto& b : r.effects[i].binders) os << "forall " << b << ". ";
            os << (r.effects[i].positive ? "+" : "-");
            print_atom(os, p, r.effects[i].atom);
        }
        os << "} <- ";
        print_formula(os, p, r.guard);
        os << "\n";
    }
    os << "reads:\n";
    for (const auto& r : p.reads) {
        os << "  " << r.id << "(";
        for (size_t i = 0; i < r.params.size(); ++i) {
            if (i) os << ",";
            os << r.params[i];
        }
        os << "): ";
        print_atom(os, p, r.target);
        os << " <- ";
        print_formula(os, p, r.guard);
        os << "\n";
    }
    return os.str();
}

}  // namespace acv::policy
