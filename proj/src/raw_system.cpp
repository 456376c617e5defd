#include "acv/raw_system.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "acv/error.hpp"
#include "lexer.hpp"

namespace acv::cli {

using detail::Tok;
using detail::Token;
using detail::TokenStream;
using logic::BitVec;
using logic::BoolExpr;

namespace {

const std::set<std::string> kKeywords = {"agent", "action", "state", "init", "trans"};

}  // namespace

kernel::System encode_raw_system(const std::string& source) {
    TokenStream ts(source);
    kernel::System sys;
    kernel::Universe& u = sys.universe;

    std::map<std::string, int> state_ids;
    std::vector<BitVec> states;
    std::map<std::string, int> action_ids;
    std::vector<std::string> action_names;
    std::vector<int> action_agents;
    std::vector<std::vector<std::pair<int, int>>> action_edges;  // (from, to) state ids
    std::vector<int> init_states;

    auto expect_ident = [&](const char* what) { return ts.expect(Tok::Ident, what); };

    while (!ts.at(Tok::End)) {
        Token kw = expect_ident("'agent', 'action', 'state', 'init' or 'trans'");
        if (kw.text == "agent") {
            if (!states.empty())
                throw Error("agent declarations must precede states", kw.line, kw.col);
            Token name = expect_ident("agent name");
            ts.expect(Tok::Colon, "':'");
            int agent = static_cast<int>(u.agents.size());
            u.agents.push_back(name.text);
            int begin = static_cast<int>(u.props.size());
            while (ts.at(Tok::Ident) && !kKeywords.count(ts.peek().text)) {
                Token p = ts.take();
                if (u.find_prop(p.text) >= 0)
                    throw Error("duplicate proposition '" + p.text + "'", p.line, p.col);
                u.props.push_back({p.text, agent, kernel::PropKind::Policy, -1});
            }
            u.span.emplace_back(begin, static_cast<int>(u.props.size()));
        } else if (kw.text == "action") {
            Token name = expect_ident("action name");
            Token owner = expect_ident("agent");
            int agent = u.find_agent(owner.text);
            if (agent < 0)
                throw Error("unknown agent '" + owner.text + "'", owner.line, owner.col);
            auto it = action_ids.find(name.text);
            if (it != action_ids.end()) {
                if (action_agents[static_cast<size_t>(it->second)] != agent)
                    throw Error("action '" + name.text +
                                    "' declared for two agents; a joint action carries a "
                                    "single non-noop element",
                                name.line, name.col);
            } else {
                action_ids[name.text] = static_cast<int>(action_names.size());
                action_names.push_back(name.text);
                action_agents.push_back(agent);
                action_edges.emplace_back();
            }
        } else if (kw.text == "state") {
            Token name = expect_ident("state name");
            ts.expect(Tok::Eq, "'='");
            Token bits = expect_ident("valuation bitstring");
            if (static_cast<int>(bits.text.size()) != u.width() ||
                bits.text.find_first_not_of("01") != std::string::npos)
                throw Error("state '" + name.text + "' needs a " +
                                std::to_string(u.width()) + "-bit valuation",
                            bits.line, bits.col);
            if (state_ids.count(name.text))
                throw Error("duplicate state '" + name.text + "'", name.line, name.col);
            state_ids[name.text] = static_cast<int>(states.size());
            states.push_back(BitVec::from_string(bits.text));
        } else if (kw.text == "init") {
            while (ts.at(Tok::Ident) && !kKeywords.count(ts.peek().text)) {
                Token s = ts.take();
                auto it = state_ids.find(s.text);
                if (it == state_ids.end())
                    throw Error("unknown state '" + s.text + "'", s.line, s.col);
                init_states.push_back(it->second);
            }
        } else if (kw.text == "trans") {
            Token from = expect_ident("source state");
            Token act = expect_ident("action");
            Token to = expect_ident("target state");
            auto fi = state_ids.find(from.text);
            auto ti = state_ids.find(to.text);
            if (fi == state_ids.end())
                throw Error("unknown state '" + from.text + "'", from.line, from.col);
            if (ti == state_ids.end())
                throw Error("unknown state '" + to.text + "'", to.line, to.col);
            auto ai = action_ids.find(act.text);
            if (ai == action_ids.end())
                throw Error("unknown action '" + act.text + "'", act.line, act.col);
            action_edges[static_cast<size_t>(ai->second)].emplace_back(fi->second,
                                                                       ti->second);
        } else {
            throw Error("unknown directive '" + kw.text + "'", kw.line, kw.col);
        }
    }

    // Derive one guarded update per action label. The effect is the union of
    // the bit flips of its edges; every edge must be exactly the effect
    // applied to its source.
    std::vector<int> support(static_cast<size_t>(u.width()));
    for (int i = 0; i < u.width(); ++i) support[static_cast<size_t>(i)] = i;
    for (size_t a = 0; a < action_names.size(); ++a) {
        kernel::Action act;
        act.id = action_names[a];
        act.agent = action_agents[a];
        std::map<int, bool> eff;
        for (const auto& [from, to] : action_edges[a]) {
            const BitVec& s = states[static_cast<size_t>(from)];
            const BitVec& t = states[static_cast<size_t>(to)];
            for (int p = 0; p < u.width(); ++p) {
                if (s.get(p) == t.get(p)) continue;
                auto it = eff.find(p);
                if (it != eff.end() && it->second != t.get(p))
                    throw Error("action '" + act.id + "' flips " +
                                u.props[static_cast<size_t>(p)].name +
                                " in both directions; not a deterministic update");
                eff[p] = t.get(p);
            }
        }
        act.effect.assign(eff.begin(), eff.end());
        std::vector<BitVec> sources;
        for (const auto& [from, to] : action_edges[a]) {
            const BitVec& s = states[static_cast<size_t>(from)];
            BitVec expect = s;
            for (const auto& [p, v] : act.effect) expect.set(p, v);
            if (!(expect == states[static_cast<size_t>(to)]))
                throw Error("edges of action '" + act.id +
                            "' are not a single consistent update");
            sources.push_back(s);
        }
        act.guard = sources.empty() ? BoolExpr::constant(false)
                                    : logic::cubes_formula(sources, support);
        sys.actions.push_back(std::move(act));
    }

    std::set<BitVec> inits;
    for (int s : init_states) inits.insert(states[static_cast<size_t>(s)]);
    if (inits.empty()) throw Error("raw system declares no initial states");
    sys.initial.assign(inits.begin(), inits.end());
    return sys;
}

std::string raw_to_text(const kernel::System& sys, const mc::ReachIndex& reach) {
    std::ostringstream os;
    const kernel::Universe& u = sys.universe;
    for (size_t ag = 0; ag < u.agents.size(); ++ag) {
        os << "agent " << u.agents[ag] << " :";
        for (int p = u.span[ag].first; p < u.span[ag].second; ++p)
            os << " " << u.props[static_cast<size_t>(p)].name;
        os << "\n";
    }
    std::set<int> used;
    for (size_t i = 0; i < reach.size(); ++i)
        for (const auto& [act, to] : reach.succs[i]) used.insert(act);
    for (int a : used)
        os << "action " << sys.actions[static_cast<size_t>(a)].id << " "
           << u.agents[static_cast<size_t>(sys.actions[static_cast<size_t>(a)].agent)]
           << "\n";
    for (size_t i = 0; i < reach.size(); ++i)
        os << "state s" << i << " = " << reach.states[i].to_string() << "\n";
    os << "init";
    for (const auto& s0 : sys.initial) os << " s" << reach.id_of(s0);
    os << "\n";
    for (size_t i = 0; i < reach.size(); ++i)
        for (const auto& [act, to] : reach.succs[i])
            os << "trans s" << i << " " << sys.actions[static_cast<size_t>(act)].id << " s"
               << to << "\n";
    return os.str();
}

}  // namespace acv::cli
