// Command-line driver: loads a policy (or raw system) and a query, runs
// direct or refinement-based verification and reports the verdict, the
// counterexample and, on request, the refinement trace.
//
// Exit status: 0 property holds, 1 property fails, 2 usage/parse error,
// 3 capacity bound exceeded.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "acv/cegar.hpp"
#include "acv/derive.hpp"
#include "acv/error.hpp"
#include "acv/query.hpp"
#include "acv/raw_system.hpp"

using namespace acv;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Report {
    std::string verdict;
    std::vector<std::string> warnings;
    std::optional<std::string> ce_text;
    std::optional<std::string> ce_json;
    std::optional<std::string> trace_json;
    uint64_t seed = 0;

    std::string text() const {
        std::ostringstream os;
        for (const auto& w : warnings) os << "warning: " << w << "\n";
        os << "verdict: " << verdict << "\n";
        if (ce_text) os << *ce_text;
        if (trace_json) os << "trace: " << *trace_json << "\n";
        return os.str();
    }

    std::string json() const {
        nlohmann::ordered_json j;
        j["verdict"] = verdict;
        j["seed"] = seed;
        if (!warnings.empty()) j["warnings"] = warnings;
        if (ce_json) j["counterexample"] = nlohmann::ordered_json::parse(*ce_json);
        if (trace_json) j["trace"] = nlohmann::ordered_json::parse(*trace_json);
        return j.dump(2) + "\n";
    }
};

std::vector<std::vector<std::string>> load_selection_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open selection script '" + path + "'");
    std::vector<std::vector<std::string>> rounds;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (!toks.empty()) rounds.push_back(toks);
    }
    return rounds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal-epistemic verification of dynamic access control policies"};

    std::string policy_path, query_path, mode = "direct", out_path, format = "text";
    std::string select_from, dump_path, keep_visible;
    size_t max_states = 10000000, max_actions = 1000000;
    uint64_t seed = 0;
    bool trace = false, all_witnesses = false;

    app.add_option("--policy", policy_path, "policy file (.acp) or raw system (.its)")
        ->required();
    app.add_option("--query", query_path, "query file (init : property)")->required();
    app.add_option("--mode", mode, "direct | cegar-auto | cegar-interactive")
        ->check(CLI::IsMember({"direct", "cegar-auto", "cegar-interactive"}));
    app.add_option("--max-states", max_states, "state exploration bound");
    app.add_option("--max-actions", max_actions, "action set bound");
    app.add_option("--out", out_path, "write the report here instead of stdout");
    app.add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--select-from", select_from,
                   "interactive selections, one whitespace-separated round per line");
    app.add_option("--dump-system", dump_path, "write the explored system to a file");
    app.add_option("--keep-visible", keep_visible,
                   "comma-separated propositions kept visible from the first abstraction");
    app.add_option("--seed", seed, "recorded in the report; orderings are canonical");
    app.add_flag("--trace", trace, "include the refinement trace");
    app.add_flag("--all-witness-paths", all_witnesses,
                 "analyse every shortest reachability witness");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help();
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        kernel::System sys;
        policy::Policy pol;
        bool derived = false;

        if (ends_with(policy_path, ".its")) {
            sys = cli::encode_raw_system(read_file(policy_path));
        } else {
            derived = true;
            policy::ParsedPolicy parsed = policy::parse_policy(read_file(policy_path));
            policy::GroundOptions gopt;
            gopt.max_actions = max_actions;
            pol = policy::ground(parsed, gopt);
        }

        kernel::DeriveOptions dopt;
        dopt.max_actions = max_actions;
        dopt.max_initial = max_states;

        policy::Query query;
        if (derived) {
            kernel::Universe u = kernel::make_universe(pol);
            query = policy::parse_query(read_file(query_path), u, pol);
            sys = kernel::derive_system(pol, query.init, dopt);
        } else {
            query = policy::parse_query_raw(read_file(query_path), sys.universe);
            std::vector<logic::BitVec> filtered;
            for (const auto& s0 : sys.initial)
                if (query.init.eval(s0)) filtered.push_back(s0);
            sys.initial = std::move(filtered);
            sys.initial_unsat = sys.initial.empty();
        }

        Report report;
        report.seed = seed;
        if (sys.initial.empty())
            report.warnings.push_back(
                "the initial formula has no model; the property holds vacuously");

        std::vector<int> seed_visible;
        if (!keep_visible.empty()) {
            std::istringstream ss(keep_visible);
            std::string name;
            while (std::getline(ss, name, ',')) {
                int p = sys.universe.find_prop(name);
                if (p < 0) throw Error("--keep-visible: unknown proposition '" + name + "'");
                seed_visible.push_back(p);
            }
        }

        mc::ReachOptions ropt;
        ropt.max_states = max_states;

        bool holds = false;
        if (mode == "direct") {
            mc::ReachIndex reach = mc::reachable(sys, ropt);
            mc::Evaluator ev(sys, reach);
            holds = ev.holds(query.property);
            if (!holds && logic::in_counterexample_fragment(query.property)) {
                auto ce = mc::counterexample(ev, query.property);
                if (ce) {
                    report.ce_text = mc::ce_to_text(*ce, sys);
                    report.ce_json = mc::ce_to_json(*ce, sys);
                }
            }
            if (!dump_path.empty()) {
                std::ofstream df(dump_path);
                df << kernel::dump_system(sys, reach);
            }
        } else {
            cegar::CegarOptions copt;
            copt.interactive = (mode == "cegar-interactive");
            copt.seed_visible = seed_visible;
            copt.reach = ropt;
            copt.ce.all_shortest_witnesses = all_witnesses;
            std::vector<std::vector<std::string>> script;
            size_t script_pos = 0;
            if (copt.interactive) {
                if (!select_from.empty()) script = load_selection_script(select_from);
                copt.selector = [&](const cegar::SelectorContext& ctx,
                                    const kernel::System& s) {
                    std::vector<std::string> toks;
                    if (!select_from.empty()) {
                        if (script_pos >= script.size())
                            throw Error("selection script exhausted at round " +
                                        std::to_string(ctx.round));
                        toks = script[script_pos++];
                    } else {
                        std::cerr << "hidden local propositions of "
                                  << s.universe.agents[static_cast<size_t>(ctx.agent)]
                                  << ":\n";
                        for (int p : ctx.candidates)
                            std::cerr << "  " << s.universe.props[static_cast<size_t>(p)].name
                                      << "\n";
                        std::cerr << "select (space-separated, or 'all'): " << std::flush;
                        std::string line;
                        if (!std::getline(std::cin, line))
                            throw Error("no selection provided");
                        std::istringstream ls(line);
                        std::string t;
                        while (ls >> t) toks.push_back(t);
                    }
                    std::vector<int> chosen;
                    for (const auto& t : toks) {
                        if (t == "all") return ctx.candidates;
                        int p = s.universe.find_prop(t);
                        if (p < 0) throw Error("unknown proposition '" + t + "'");
                        chosen.push_back(p);
                    }
                    return chosen;
                };
            }
            cegar::CegarOutcome outcome =
                cegar::cegar_loop(sys, query.property, query.init_atoms, copt);
            holds = outcome.holds;
            if (outcome.concrete_ce) {
                report.ce_text = mc::ce_to_text(*outcome.concrete_ce, sys);
                report.ce_json = mc::ce_to_json(*outcome.concrete_ce, sys);
            }
            if (trace) report.trace_json = cegar::trace_to_json(outcome.trace);
            if (!dump_path.empty()) {
                mc::ReachIndex reach = mc::reachable(sys, ropt);
                std::ofstream df(dump_path);
                df << kernel::dump_system(sys, reach);
            }
        }

        report.verdict = holds ? "holds" : "fails";
        std::string rendered = format == "json" ? report.json() : report.text();
        if (out_path.empty()) {
            std::cout << rendered;
        } else {
            std::ofstream of(out_path, std::ios::binary);
            of << rendered;
        }
        return holds ? 0 : 1;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
