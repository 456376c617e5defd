#include "acv/query.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "acv/error.hpp"
#include "lexer.hpp"

namespace acv::policy {

using detail::Tok;
using detail::Token;
using detail::TokenStream;
using logic::BoolExpr;
using logic::Ctlk;
using logic::CtlkOp;

namespace {

const std::set<std::string> kReserved = {"true", "false", "K",    "A",    "E",
                                         "U",    "R",     "AG",   "AX",   "AF",
                                         "EX",   "EG",    "EF",   "loc",  "read",
                                         "def"};

// Macro placeholders inside the initial formula, resolved after parsing.
constexpr int kClosedWorld = -2;
constexpr int kLocClosed = -3;

using AtomResolver = std::function<int(const std::string&)>;

class QueryParser {
public:
    QueryParser(const std::string& src, const kernel::Universe& u, AtomResolver resolve,
                bool local_bits)
        : ts_(src), u_(u), resolve_(std::move(resolve)), local_bits_(local_bits) {}

    Query parse() {
        while (ts_.at_ident("def")) parse_def();

        allow_macros_ = true;
        Ctlk init_ast = parse_ctlk();
        allow_macros_ = false;
        ts_.expect(Tok::Colon, "':' between the initial formula and the property");

        bool closed_world = false, loc_closed = false;
        Ctlk stripped = strip_macros(init_ast, true, closed_world, loc_closed);
        if (!stripped.is_propositional())
            throw Error("the initial formula must be propositional");

        Query q;
        std::set<int> explicit_atoms;
        stripped.collect_atoms(explicit_atoms);
        q.init_atoms.assign(explicit_atoms.begin(), explicit_atoms.end());

        std::vector<BoolExpr> conjuncts{stripped.to_bool_expr()};
        if (closed_world) {
            for (int p = 0; p < u_.policy_count(); ++p)
                if (!explicit_atoms.count(p)) conjuncts.push_back(BoolExpr::lit(p, false));
        }
        if (loc_closed) {
            if (!local_bits_)
                throw Error("@loc_closed needs a policy-derived system");
            for (size_t ag = 1; ag < u_.agents.size(); ++ag)
                for (int p = 0; p < u_.policy_count(); ++p)
                    conjuncts.push_back(BoolExpr::disj(
                        {BoolExpr::var(u_.read_index(static_cast<int>(ag), p)),
                         BoolExpr::lit(u_.loc_index(static_cast<int>(ag), p), false)}));
        }
        q.init = BoolExpr::conj(std::move(conjuncts));

        q.property = parse_ctlk();
        ts_.expect(Tok::End, "end of query");
        return q;
    }

private:
    static bool is_macro(const Ctlk& f) {
        return f.op() == CtlkOp::Atom && f.prop() < -1;
    }

    // Macros are only meaningful as top-level conjuncts of the initial
    // formula; anywhere else they are rejected.
    Ctlk strip_macros(const Ctlk& f, bool top_conj, bool& cw, bool& lc) {
        if (is_macro(f)) {
            if (!top_conj)
                throw Error("closure macros may only appear as top-level conjuncts");
            (f.prop() == kClosedWorld ? cw : lc) = true;
            return Ctlk::constant(true);
        }
        if (f.op() == CtlkOp::And && top_conj)
            return Ctlk::conj(strip_macros(f.kids()[0], true, cw, lc),
                              strip_macros(f.kids()[1], true, cw, lc));
        std::set<int> atoms;
        f.collect_atoms(atoms);
        for (int a : atoms)
            if (a < -1) throw Error("closure macros may only appear as top-level conjuncts");
        return f;
    }

    void parse_def() {
        ts_.take();  // def
        Token name = ts_.expect(Tok::Ident, "definition name");
        if (kReserved.count(name.text) || lookup_def(name.text))
            throw Error("definition name '" + name.text + "' is reserved or duplicated",
                        name.line, name.col);
        ts_.expect(Tok::Define, "':='");
        Ctlk body = parse_ctlk();
        if (!body.is_propositional())
            throw Error("definition '" + name.text + "' must be propositional", name.line,
                        name.col);
        defs_.emplace_back(name.text, std::move(body));
    }

    const Ctlk* lookup_def(const std::string& name) const {
        for (const auto& [n, f] : defs_)
            if (n == name) return &f;
        return nullptr;
    }

    int resolve_agent(const Token& t) const {
        int idx = u_.find_agent(t.text);
        if (idx <= 0)
            throw Error("'" + t.text + "' is not a declared agent", t.line, t.col);
        return idx;
    }

    int parse_ground_atom(const Token& name) {
        std::string text = name.text;
        if (ts_.at(Tok::LParen)) {
            ts_.take();
            text += "(";
            bool first = true;
            while (!ts_.at(Tok::RParen)) {
                if (!first) {
                    ts_.expect(Tok::Comma, "','");
                    text += ",";
                }
                Token obj = ts_.expect(Tok::Ident, "object");
                text += obj.text;
                first = false;
            }
            ts_.take();
            text += ")";
        }
        int id = resolve_(text);
        if (id < 0)
            throw Error("'" + text + "' is not a declared proposition", name.line, name.col);
        return id;
    }

    int parse_local_atom(const Token& kw) {
        if (!local_bits_)
            throw Error("loc()/read() atoms need a policy-derived system", kw.line, kw.col);
        ts_.expect(Tok::LParen, "'('");
        int ag = resolve_agent(ts_.expect(Tok::Ident, "agent"));
        ts_.expect(Tok::Comma, "','");
        Token name = ts_.expect(Tok::Ident, "policy atom");
        int base = parse_ground_atom(name);
        ts_.expect(Tok::RParen, "')'");
        return kw.text == "loc" ? u_.loc_index(ag, base) : u_.read_index(ag, base);
    }

    Ctlk parse_ctlk() {
        Ctlk lhs = parse_or();
        if (ts_.at(Tok::Arrow)) {
            ts_.take();
            return Ctlk::implies(std::move(lhs), parse_ctlk());
        }
        return lhs;
    }

    Ctlk parse_or() {
        Ctlk f = parse_and();
        while (ts_.at(Tok::Pipe)) {
            ts_.take();
            f = Ctlk::disj(std::move(f), parse_and());
        }
        return f;
    }

    Ctlk parse_and() {
        Ctlk f = parse_unary();
        while (ts_.at(Tok::Amp)) {
            ts_.take();
            f = Ctlk::conj(std::move(f), parse_unary());
        }
        return f;
    }

    Ctlk parse_unary() {
        Token t = ts_.peek();
        if (ts_.at(Tok::At)) {
            Token at = ts_.take();
            Token name = ts_.expect(Tok::Ident, "macro name");
            if (!allow_macros_)
                throw Error("macros are only valid in the initial formula", at.line, at.col);
            if (name.text == "closedworld") return Ctlk::atom(kClosedWorld);
            if (name.text == "loc_closed") return Ctlk::atom(kLocClosed);
            throw Error("unknown macro '@" + name.text + "'", at.line, at.col);
        }
        if (ts_.at(Tok::Tilde)) {
            ts_.take();
            return Ctlk::negate(parse_unary());
        }
        if (ts_.at(Tok::LParen)) {
            ts_.take();
            Ctlk f = parse_ctlk();
            ts_.expect(Tok::RParen, "')'");
            return f;
        }
        if (!ts_.at(Tok::Ident))
            throw Error("expected a formula, found '" + t.text + "'", t.line, t.col);

        if (t.text == "true" || t.text == "false") {
            ts_.take();
            return Ctlk::constant(t.text == "true");
        }
        if (t.text == "K") {
            ts_.take();
            ts_.expect(Tok::LParen, "'('");
            int ag = resolve_agent(ts_.expect(Tok::Ident, "agent"));
            ts_.expect(Tok::Comma, "','");
            Ctlk body = parse_ctlk();
            ts_.expect(Tok::RParen, "')'");
            return Ctlk::knows(ag, std::move(body));
        }
        if (t.text == "AG" || t.text == "AX" || t.text == "AF" || t.text == "EX" ||
            t.text == "EG" || t.text == "EF") {
            ts_.take();
            ts_.expect(Tok::LParen, "'('");
            Ctlk body = parse_ctlk();
            ts_.expect(Tok::RParen, "')'");
            CtlkOp op = t.text == "AG"   ? CtlkOp::AG
                        : t.text == "AX" ? CtlkOp::AX
                        : t.text == "AF" ? CtlkOp::AF
                        : t.text == "EX" ? CtlkOp::EX
                        : t.text == "EG" ? CtlkOp::EG
                                         : CtlkOp::EF;
            return Ctlk::unary(op, std::move(body));
        }
        if (t.text == "A" || t.text == "E") {
            ts_.take();
            ts_.expect(Tok::LParen, "'('");
            Ctlk a = parse_ctlk();
            Token conn = ts_.expect(Tok::Ident, "'U' or 'R'");
            if (conn.text != "U" && conn.text != "R")
                throw Error("expected 'U' or 'R'", conn.line, conn.col);
            Ctlk b = parse_ctlk();
            ts_.expect(Tok::RParen, "')'");
            if (t.text == "E") {
                if (conn.text == "U")
                    return Ctlk::binary(CtlkOp::EU, std::move(a), std::move(b));
                throw Error("E(.. R ..) is not supported", t.line, t.col);
            }
            return Ctlk::binary(conn.text == "U" ? CtlkOp::AU : CtlkOp::AR, std::move(a),
                                std::move(b));
        }
        if (t.text == "loc" || t.text == "read") {
            ts_.take();
            return Ctlk::atom(parse_local_atom(t));
        }
        ts_.take();
        if (const Ctlk* def = lookup_def(t.text)) return *def;
        return Ctlk::atom(parse_ground_atom(t));
    }

    TokenStream ts_;
    const kernel::Universe& u_;
    AtomResolver resolve_;
    bool local_bits_;
    std::vector<std::pair<std::string, Ctlk>> defs_;
    bool allow_macros_ = false;
};

}  // namespace

Query parse_query(const std::string& source, const kernel::Universe& u, const Policy& pol) {
    return QueryParser(source, u,
                       [&pol](const std::string& n) { return pol.atoms.find(n); },
                       u.has_local_bits())
        .parse();
}

Query parse_query_raw(const std::string& source, const kernel::Universe& u) {
    return QueryParser(source, u,
                       [&u](const std::string& n) { return u.find_prop(n); }, false)
        .parse();
}

}  // namespace acv::policy
