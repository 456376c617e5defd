#include "acv/counterexample.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include <nlohmann/json.hpp>

#include "acv/error.hpp"

namespace acv::mc {

using logic::BitVec;
using logic::Ctlk;
using logic::CtlkOp;

int CeTree::add_vertex(const BitVec& s) {
    vertices.push_back(s);
    out.emplace_back();
    return static_cast<int>(vertices.size()) - 1;
}

int CeTree::add_edge(CeEdge e) {
    int id = static_cast<int>(edges.size());
    out[static_cast<size_t>(e.from)].push_back(id);
    edges.push_back(std::move(e));
    return id;
}

std::vector<std::vector<int>> CeTree::paths() const {
    std::vector<std::vector<int>> result;
    std::vector<int> cur;
    std::function<void(int)> dfs = [&](int v) {
        if (out[static_cast<size_t>(v)].empty()) {
            result.push_back(cur);
            return;
        }
        // Temporal branches first; path-by-path validation then meets the
        // purely temporal evidence before any epistemic jump.
        std::vector<int> order = out[static_cast<size_t>(v)];
        std::stable_sort(order.begin(), order.end(), [this](int a, int b) {
            return edges[static_cast<size_t>(a)].epistemic <
                   edges[static_cast<size_t>(b)].epistemic;
        });
        for (int e : order) {
            cur.push_back(e);
            dfs(edges[static_cast<size_t>(e)].to);
            cur.pop_back();
        }
    };
    dfs(root);
    return result;
}

namespace {

struct BfsTree {
    std::vector<int> dist;                 // -1 when unreached
    std::vector<std::pair<int, int>> par;  // (action, parent state id)
};

// Successor expansion follows action-identifier order so reconstructed paths
// are stable across runs.
BfsTree bfs(const kernel::System& sys, const ReachIndex& reach,
            const std::vector<int>& sources) {
    std::vector<int> rank(sys.actions.size());
    {
        std::vector<int> order(sys.actions.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return sys.actions[static_cast<size_t>(a)].id < sys.actions[static_cast<size_t>(b)].id;
        });
        for (size_t i = 0; i < order.size(); ++i) rank[static_cast<size_t>(order[i])] =
            static_cast<int>(i);
    }
    BfsTree t;
    t.dist.assign(reach.size(), -1);
    t.par.assign(reach.size(), {-1, -1});
    std::deque<int> q;
    for (int s : sources) {
        if (t.dist[static_cast<size_t>(s)] == 0) continue;
        t.dist[static_cast<size_t>(s)] = 0;
        q.push_back(s);
    }
    while (!q.empty()) {
        int s = q.front();
        q.pop_front();
        auto succs = reach.succs[static_cast<size_t>(s)];
        std::sort(succs.begin(), succs.end(), [&](const auto& a, const auto& b) {
            if (rank[static_cast<size_t>(a.first)] != rank[static_cast<size_t>(b.first)])
                return rank[static_cast<size_t>(a.first)] < rank[static_cast<size_t>(b.first)];
            return a.second < b.second;
        });
        for (const auto& [act, to] : succs) {
            if (t.dist[static_cast<size_t>(to)] != -1) continue;
            t.dist[static_cast<size_t>(to)] = t.dist[static_cast<size_t>(s)] + 1;
            t.par[static_cast<size_t>(to)] = {act, s};
            q.push_back(to);
        }
    }
    return t;
}

std::vector<std::pair<int, int>> unwind(const BfsTree& t, int target) {
    std::vector<std::pair<int, int>> steps;  // (action, state) root-to-target
    int cur = target;
    while (t.par[static_cast<size_t>(cur)].second != -1) {
        steps.push_back({t.par[static_cast<size_t>(cur)].first, cur});
        cur = t.par[static_cast<size_t>(cur)].second;
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
}

int bfs_origin(const BfsTree& t, int target) {
    int cur = target;
    while (t.par[static_cast<size_t>(cur)].second != -1)
        cur = t.par[static_cast<size_t>(cur)].second;
    return cur;
}

class Extractor {
public:
    explicit Extractor(Evaluator& ev) : ev_(ev), sys_(ev.system()), reach_(ev.reach()) {
        std::vector<int> sources;
        for (const auto& s0 : sys_.initial) sources.push_back(reach_.id_of(s0));
        init_bfs_ = bfs(sys_, reach_, sources);
    }

    std::optional<CeTree> run(const Ctlk& f) {
        if (!logic::in_counterexample_fragment(f))
            throw Error("property outside the supported counterexample fragment");
        int root_state = -1;
        for (const auto& s0 : sys_.initial) {
            int id = reach_.id_of(s0);
            if (!ev_.state_sat(f, id)) {
                root_state = id;
                break;
            }
        }
        if (root_state < 0) return std::nullopt;
        tree_ = CeTree{};
        tree_.root = tree_.add_vertex(reach_.states[static_cast<size_t>(root_state)]);
        violate(tree_.root, root_state, f);
        return tree_;
    }

private:
    // Extends the tree below `vertex` with evidence that `state` violates f.
    void violate(int vertex, int state, const Ctlk& f) {
        if (f.is_propositional()) return;  // the vertex itself carries the refutation
        switch (f.op()) {
            case CtlkOp::And: {
                for (const auto& k : f.kids())
                    if (!ev_.state_sat(k, state)) {
                        violate(vertex, state, k);
                        return;
                    }
                throw Error("internal: violated conjunction with no violated conjunct");
            }
            case CtlkOp::Or: {
                for (const auto& k : f.kids()) violate(vertex, state, k);
                return;
            }
            case CtlkOp::Implies: {
                // Antecedents are propositional in this fragment; only the
                // consequent needs evidence.
                violate(vertex, state, f.kids()[1]);
                return;
            }
            case CtlkOp::Not: {
                // ~K(a, prop): K holds here, which needs no finite witness.
                return;
            }
            case CtlkOp::K: {
                const Ctlk& body = f.kids()[0];
                const Bits& sat_body = ev_.sat(body);
                int ag = f.agent();
                int best = -1;
                const auto& block =
                    reach_.blocks[static_cast<size_t>(ag)]
                                 [static_cast<size_t>(reach_.block_of[static_cast<size_t>(ag)]
                                                                     [static_cast<size_t>(state)])];
                for (int m : block) {
                    if (sat_body[static_cast<size_t>(m)]) continue;
                    if (best == -1 ||
                        init_bfs_.dist[static_cast<size_t>(m)] <
                            init_bfs_.dist[static_cast<size_t>(best)] ||
                        (init_bfs_.dist[static_cast<size_t>(m)] ==
                             init_bfs_.dist[static_cast<size_t>(best)] &&
                         reach_.states[static_cast<size_t>(m)] <
                             reach_.states[static_cast<size_t>(best)]))
                        best = m;
                }
                if (best < 0)
                    throw Error("internal: violated K with no witness in the block");
                CeEdge e;
                e.from = vertex;
                e.to = tree_.add_vertex(reach_.states[static_cast<size_t>(best)]);
                e.epistemic = true;
                e.agent = ag;
                int origin = bfs_origin(init_bfs_, best);
                e.witness.start = reach_.states[static_cast<size_t>(origin)];
                for (const auto& [act, st] : unwind(init_bfs_, best))
                    e.witness.steps.push_back({act, reach_.states[static_cast<size_t>(st)]});
                int child = e.to;
                tree_.add_edge(std::move(e));
                violate(child, best, body);
                return;
            }
            case CtlkOp::AG: {
                const Ctlk& body = f.kids()[0];
                const Bits& sat_body = ev_.sat(body);
                BfsTree local = bfs(sys_, reach_, {state});
                int best = -1;
                for (size_t m = 0; m < reach_.size(); ++m) {
                    if (local.dist[m] < 0 || sat_body[m]) continue;
                    if (best == -1 || local.dist[m] < local.dist[static_cast<size_t>(best)] ||
                        (local.dist[m] == local.dist[static_cast<size_t>(best)] &&
                         reach_.states[m] < reach_.states[static_cast<size_t>(best)]))
                        best = static_cast<int>(m);
                }
                if (best < 0) throw Error("internal: violated AG with no violating state");
                int v = vertex;
                for (const auto& [act, st] : unwind(local, best)) {
                    CeEdge e;
                    e.from = v;
                    e.to = tree_.add_vertex(reach_.states[static_cast<size_t>(st)]);
                    e.action = act;
                    v = e.to;
                    tree_.add_edge(std::move(e));
                }
                violate(v, best, body);
                return;
            }
            case CtlkOp::AX: {
                const Ctlk& body = f.kids()[0];
                const Bits& sat_body = ev_.sat(body);
                auto succs = reach_.succs[static_cast<size_t>(state)];
                std::sort(succs.begin(), succs.end(), [&](const auto& a, const auto& b) {
                    const std::string& ia = sys_.actions[static_cast<size_t>(a.first)].id;
                    const std::string& ib = sys_.actions[static_cast<size_t>(b.first)].id;
                    if (ia != ib) return ia < ib;
                    return a.second < b.second;
                });
                for (const auto& [act, to] : succs) {
                    if (sat_body[static_cast<size_t>(to)]) continue;
                    CeEdge e;
                    e.from = vertex;
                    e.to = tree_.add_vertex(reach_.states[static_cast<size_t>(to)]);
                    e.action = act;
                    int child = e.to;
                    tree_.add_edge(std::move(e));
                    violate(child, to, body);
                    return;
                }
                throw Error("internal: violated AX with no violating successor");
            }
            default:
                throw Error("property outside the supported counterexample fragment");
        }
    }

    Evaluator& ev_;
    const kernel::System& sys_;
    const ReachIndex& reach_;
    BfsTree init_bfs_;
    CeTree tree_;
};

std::string props_on(const BitVec& s, const kernel::System& sys) {
    std::string out;
    for (int i = 0; i < s.width(); ++i) {
        if (!s.get(i)) continue;
        if (!out.empty()) out += " ";
        out += sys.universe.props[static_cast<size_t>(i)].name;
    }
    return out;
}

}  // namespace

std::optional<CeTree> counterexample(Evaluator& ev, const Ctlk& f) {
    return Extractor(ev).run(f);
}

std::string ce_to_text(const CeTree& ce, const kernel::System& sys) {
    std::ostringstream os;
    os << "counterexample (root v" << ce.root << ")\n";
    for (size_t v = 0; v < ce.vertices.size(); ++v)
        os << "  v" << v << " = " << ce.vertices[v].to_string() << "  {"
           << props_on(ce.vertices[v], sys) << "}\n";
    for (const auto& e : ce.edges) {
        if (!e.epistemic) {
            os << "  v" << e.from << " -[" << sys.actions[static_cast<size_t>(e.action)].id
               << "]-> v" << e.to << "\n";
        } else {
            os << "  v" << e.from << " ~["
               << sys.universe.agents[static_cast<size_t>(e.agent)] << "]~ v" << e.to
               << "  witness: " << e.witness.start.to_string();
            for (const auto& [act, st] : e.witness.steps)
                os << " -[" << sys.actions[static_cast<size_t>(act)].id << "]-> "
                   << st.to_string();
            os << "\n";
        }
    }
    auto paths = ce.paths();
    for (const auto& p : paths) {
        os << "  path: v" << ce.root;
        for (int e : p) os << " -> v" << ce.edges[static_cast<size_t>(e)].to;
        os << "\n";
    }
    return os.str();
}

std::string ce_to_json(const CeTree& ce, const kernel::System& sys) {
    nlohmann::ordered_json j;
    j["root"] = ce.root;
    j["vertices"] = nlohmann::ordered_json::array();
    for (size_t v = 0; v < ce.vertices.size(); ++v) {
        nlohmann::ordered_json jv;
        jv["id"] = v;
        jv["state"] = ce.vertices[v].to_string();
        jv["props"] = props_on(ce.vertices[v], sys);
        j["vertices"].push_back(jv);
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : ce.edges) {
        nlohmann::ordered_json je;
        je["from"] = e.from;
        je["to"] = e.to;
        if (!e.epistemic) {
            je["type"] = "action";
            je["label"] = sys.actions[static_cast<size_t>(e.action)].id;
        } else {
            je["type"] = "knows";
            je["agent"] = sys.universe.agents[static_cast<size_t>(e.agent)];
            nlohmann::ordered_json jw;
            jw["start"] = e.witness.start.to_string();
            jw["steps"] = nlohmann::ordered_json::array();
            for (const auto& [act, st] : e.witness.steps) {
                nlohmann::ordered_json js;
                js["action"] = sys.actions[static_cast<size_t>(act)].id;
                js["to"] = st.to_string();
                jw["steps"].push_back(js);
            }
            je["witness"] = jw;
        }
        j["edges"].push_back(je);
    }
    j["paths"] = nlohmann::ordered_json::array();
    for (const auto& p : ce.paths()) {
        nlohmann::ordered_json jp = nlohmann::ordered_json::array();
        jp.push_back(ce.root);
        for (int e : p) jp.push_back(ce.edges[static_cast<size_t>(e)].to);
        j["paths"].push_back(jp);
    }
    return j.dump(2);
}

}  // namespace acv::mc
