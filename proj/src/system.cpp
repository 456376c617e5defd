#include "acv/system.hpp"

#include <sstream>

#include "acv/reach.hpp"

namespace acv::kernel {

Universe make_universe(const policy::Policy& pol) {
    Universe u;
    u.agents.push_back("e");
    for (const auto& a : pol.agents) u.agents.push_back(a);

    int n = static_cast<int>(pol.atoms.names.size());
    for (int p = 0; p < n; ++p)
        u.props.push_back({pol.atoms.names[static_cast<size_t>(p)], 0, PropKind::Policy, -1});
    u.span.emplace_back(0, n);

    for (size_t i = 0; i < pol.agents.size(); ++i) {
        int agent = static_cast<int>(i) + 1;
        int begin = static_cast<int>(u.props.size());
        for (int p = 0; p < n; ++p) {
            const std::string& base = pol.atoms.names[static_cast<size_t>(p)];
            u.props.push_back(
                {"loc(" + pol.agents[i] + "," + base + ")", agent, PropKind::Loc, p});
            u.props.push_back(
                {"read(" + pol.agents[i] + "," + base + ")", agent, PropKind::Read, p});
        }
        u.span.emplace_back(begin, static_cast<int>(u.props.size()));
    }
    return u;
}

std::optional<logic::BitVec> apply_action(const Action& a, const logic::BitVec& s) {
    if (!a.guard.eval(s)) return std::nullopt;
    logic::BitVec t = s;
    for (const auto& [prop, sign] : a.effect) t.set(prop, sign);
    return t;
}

StateSet post_image(const System& sys, int action, const StateSet& states) {
    const Action& a = sys.actions[static_cast<size_t>(action)];
    StateSet out;
    for (const auto& s : states)
        if (auto t = apply_action(a, s)) out.insert(*t);
    return out;
}

StateSet pre_image(const System& sys, int action, const StateSet& states) {
    const Action& a = sys.actions[static_cast<size_t>(action)];
    StateSet out;
    size_t k = a.effect.size();
    for (const auto& t : states) {
        // The effect forces the touched bits of any successor.
        bool compatible = true;
        for (const auto& [prop, sign] : a.effect)
            if (t.get(prop) != sign) {
                compatible = false;
                break;
            }
        if (!compatible) continue;
        // Sources agree with t outside the effect; touched bits are free.
        for (size_t mask = 0; mask < (size_t{1} << k); ++mask) {
            logic::BitVec s = t;
            for (size_t j = 0; j < k; ++j) s.set(a.effect[j].first, (mask >> j) & 1);
            if (a.guard.eval(s)) out.insert(s);
        }
    }
    return out;
}

std::string dump_system(const System& sys, const mc::ReachIndex& reach) {
    std::ostringstream os;
    const Universe& u = sys.universe;
    for (size_t ag = 0; ag < u.agents.size(); ++ag) {
        os << "agent " << u.agents[ag] << " :";
        for (int p = u.span[ag].first; p < u.span[ag].second; ++p)
            os << " " << u.props[static_cast<size_t>(p)].name;
        os << "\n";
    }
    for (const auto& a : sys.actions) {
        os << "action " << a.id << " " << u.agents[static_cast<size_t>(a.agent)] << " : ";
        for (const auto& [prop, sign] : a.effect)
            os << (sign ? "+" : "-") << u.props[static_cast<size_t>(prop)].name << " ";
        os << "<- "
           << a.guard.to_string([&](int v) { return u.props[static_cast<size_t>(v)].name; })
           << "\n";
    }
    for (size_t i = 0; i < reach.states.size(); ++i)
        os << "state s" << i << " = " << reach.states[i].to_string() << "\n";
    for (const auto& s0 : sys.initial) os << "init s" << reach.id_of(s0) << "\n";
    for (size_t i = 0; i < reach.states.size(); ++i)
        for (const auto& [act, to] : reach.succs[i])
            os << "trans s" << i << " " << sys.actions[static_cast<size_t>(act)].id << " s"
               << to << "\n";
    return os.str();
}

}  // namespace acv::kernel
