#include "cml/discovery.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <set>

#include "cml/cpdag.hpp"
#include "cml/graph_json.hpp"
#include "cml/parallel.hpp"
#include "cml/subsets.hpp"

namespace cml {

void DiscoveryConfig::validate() const {
    if (!(alpha_skel > 0.0 && alpha_skel < 1.0)) throw InvalidArgument("alpha_skel must lie in (0, 1)");
    if (lmax < 0) throw InvalidArgument("lmax must be non-negative");
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Size-k subsets of `first`, then the size-k subsets of `second` that are not
// also subsets of `first`. Returns the first separating set found.
std::optional<NodeSet> search_pools(const CiTester& tester, int i, int j, const NodeSet& first, const NodeSet& second,
                                    int k, double alpha) {
    std::optional<NodeSet> found;
    auto check = [&](const NodeSet& s) {
        if (tester.test(i, j, s, alpha).independent) {
            found = s;
            return true;
        }
        return false;
    };
    if (for_each_subset(first, k, check)) return found;
    for_each_subset(second, k, [&](const NodeSet& s) {
        if (std::includes(first.begin(), first.end(), s.begin(), s.end())) return false;
        return check(s);
    });
    return found;
}

enum class PoolMode { Union, Separate };

// Stable level-wise skeleton search; g starts with the candidate edges.
void stable_skeleton(MixedGraph& g, SepsetMap& sepsets, const CiTester& tester, const DiscoveryConfig& cfg, PoolMode mode) {
    for (int level = 0; level <= cfg.lmax; ++level) {
        const auto edges = g.edges();
        std::vector<std::optional<NodeSet>> found(edges.size());
        std::vector<char> eligible(edges.size(), 0);
        parallel_for(edges.size(), [&](std::size_t k) {
            const auto& e = edges[k];
            NodeSet a = nodeset::without(g.neighbors(e.i), e.j);
            NodeSet b = nodeset::without(g.neighbors(e.j), e.i);
            if (mode == PoolMode::Union) {
                NodeSet pool = nodeset::unite(a, b);
                if (static_cast<int>(pool.size()) < level) return;
                eligible[k] = 1;
                found[k] = search_pools(tester, e.i, e.j, pool, {}, level, cfg.alpha_skel);
            } else {
                if (static_cast<int>(std::max(a.size(), b.size())) < level) return;
                eligible[k] = 1;
                found[k] = search_pools(tester, e.i, e.j, a, b, level, cfg.alpha_skel);
            }
        });
        bool any = false;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            any = any || eligible[k];
            if (!found[k]) continue;
            g.remove_edge(edges[k].i, edges[k].j);
            sepsets.set(edges[k].i, edges[k].j, *found[k]);
        }
        if (!any) break;
    }
}

MixedGraph complete_graph(int p, const NodeSet& nodes, const std::vector<std::string>& names) {
    MixedGraph g(p, names);
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = a + 1; b < nodes.size(); ++b) g.add_undirected(nodes[a], nodes[b]);
    return g;
}

// Runs `body` on a memoizing session unless the tester already is one, then
// credits the session's counts to the caller's tester.
template <class Body>
DiscoveryResult in_session(const CiTester& tester, Body body) {
    CiTester s = tester.session();
    DiscoveryResult r = body(s);
    tester.absorb(s);
    return r;
}

std::vector<std::string> tester_names(const CiTester& tester) {
    if (const auto* dag = tester.dag()) return dag->graph().names();
    return {};
}

}  // namespace

Skeleton phase1_union_skeleton(const NeighborSets& nbs, const CiTester& tester, const DiscoveryConfig& cfg) {
    cfg.validate();
    Skeleton out{complete_graph(tester.size(), nbs.all, tester_names(tester)), {}};
    stable_skeleton(out.graph, out.sepsets, tester, cfg, PoolMode::Union);
    return out;
}

Skeleton phase2_local_prune(Skeleton skel, const NeighborSets& nbs, const CiTester& tester, const DiscoveryConfig& cfg) {
    cfg.validate();
    std::set<std::pair<int, int>> tested;
    for (const auto& nb : nbs.nb) {
        auto in_nb = nodeset::mask(nb, skel.graph.size());
        std::vector<Edge> edges;
        for (const auto& e : skel.graph.edges())
            if (in_nb[static_cast<std::size_t>(e.i)] && in_nb[static_cast<std::size_t>(e.j)] && tested.emplace(e.i, e.j).second)
                edges.push_back(e);
        std::vector<std::optional<NodeSet>> found(edges.size());
        parallel_for(edges.size(), [&](std::size_t k) {
            int i = edges[k].i, j = edges[k].j;
            NodeSet a = nodeset::without(nbs.first(i), j);
            NodeSet b = nodeset::without(nbs.first(j), i);
            for (int level = 1; level <= cfg.lmax && !found[k]; ++level)
                found[k] = search_pools(tester, i, j, a, b, level, cfg.alpha_skel);
        });
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (!found[k]) continue;
            skel.graph.remove_edge(edges[k].i, edges[k].j);
            skel.sepsets.set(edges[k].i, edges[k].j, *found[k]);
        }
    }
    return skel;
}

MixedGraph orient_cml(const MixedGraph& skeleton, const SepsetMap& sepsets, const NeighborSets& nbs, const RuleToggles& rules) {
    MixedGraph g = skeleton.with_uniform_marks(Mark::Circle);
    orient_v_structures(g, sepsets);
    apply_fci_rules(g, sepsets, rules);
    apply_rn(g, nbs);
    close_ancestral_circles(g);
    return g;
}

DiscoveryResult run_cml_given(const CiTester& tester, const NeighborSets& nbs, const DiscoveryConfig& cfg) {
    if (!tester.is_session()) return in_session(tester, [&](const CiTester& s) { return run_cml_given(s, nbs, cfg); });
    cfg.validate();
    DiscoveryResult r;
    r.algorithm = "cml";
    r.nbs = nbs;
    const long long before = tester.count();
    const long long singular_before = tester.singular_count();

    auto t0 = Clock::now();
    Skeleton skel = phase1_union_skeleton(nbs, tester, cfg);
    r.phase1 = skel.graph;
    r.timing_ms["phase1"] = elapsed_ms(t0);

    t0 = Clock::now();
    skel = phase2_local_prune(std::move(skel), nbs, tester, cfg);
    r.phase2 = skel.graph;
    r.timing_ms["phase2"] = elapsed_ms(t0);

    t0 = Clock::now();
    r.graph = orient_cml(skel.graph, skel.sepsets, nbs, cfg.rules);
    r.timing_ms["orientation"] = elapsed_ms(t0);
    r.sepsets = std::move(skel.sepsets);
    r.conflicts = bidirected_within(r.graph, nbs);
    r.ci_tests = tester.count() - before;
    r.singular_tests = tester.singular_count() - singular_before;
    return r;
}

namespace {

template <class Run>
DiscoveryResult with_blankets(const CiTester& tester, const TargetSpec& t, const MbConfig& mb, Run run) {
    mb.validate();
    const long long before = tester.count();
    const long long singular_before = tester.singular_count();
    auto t0 = Clock::now();
    NeighborSets nbs = build_neighbor_sets(t, tester, mb.alpha, mb.lmax);
    const double mb_ms = elapsed_ms(t0);
    const long long mb_tests = tester.count() - before;
    DiscoveryResult r = run(nbs);
    r.timing_ms["mb"] = mb_ms;
    r.mb_tests = mb_tests;
    r.ci_tests = tester.count() - before;
    r.singular_tests = tester.singular_count() - singular_before;
    return r;
}

}  // namespace

DiscoveryResult run_cml(const CiTester& tester, const TargetSpec& t, const MbConfig& mb, const DiscoveryConfig& cfg) {
    if (!tester.is_session()) return in_session(tester, [&](const CiTester& s) { return run_cml(s, t, mb, cfg); });
    return with_blankets(tester, t, mb, [&](const NeighborSets& nbs) { return run_cml_given(tester, nbs, cfg); });
}

DiscoveryResult run_snl_given(const CiTester& tester, const NeighborSets& nbs, const DiscoveryConfig& cfg) {
    if (!tester.is_session()) return in_session(tester, [&](const CiTester& s) { return run_snl_given(s, nbs, cfg); });
    cfg.validate();
    DiscoveryResult r;
    r.algorithm = "snl";
    r.nbs = nbs;
    const long long before = tester.count();
    const long long singular_before = tester.singular_count();
    const int p = tester.size();
    auto t0 = Clock::now();

    // Learn each neighborhood on its own.
    std::vector<MixedGraph> local;
    for (const auto& nb : nbs.nb) {
        MixedGraph g = complete_graph(p, nb, tester_names(tester));
        const auto edges = g.edges();
        std::vector<std::optional<NodeSet>> found(edges.size());
        parallel_for(edges.size(), [&](std::size_t k) {
            int i = edges[k].i, j = edges[k].j;
            NodeSet a = nodeset::without(nbs.first(i), j);
            NodeSet b = nodeset::without(nbs.first(j), i);
            for (int level = 0; level <= cfg.lmax && !found[k]; ++level)
                found[k] = search_pools(tester, i, j, a, b, level, cfg.alpha_skel);
        });
        SepsetMap seps;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (!found[k]) continue;
            g.remove_edge(edges[k].i, edges[k].j);
            seps.set(edges[k].i, edges[k].j, *found[k]);
            r.sepsets.set(edges[k].i, edges[k].j, *found[k]);
        }
        orient_pc_v_structures(g, seps);
        meek_closure(g);
        local.push_back(std::move(g));
    }

    // Merge: an orientation beats "undirected", opposite orientations and
    // bidirected conflicts are flagged.
    r.graph = MixedGraph(p, tester_names(tester));
    std::set<std::pair<int, int>> flagged;
    for (const auto& g : local) {
        for (const auto& e : g.edges()) {
            if (!r.graph.adjacent(e.i, e.j)) {
                r.graph.set_edge(e.i, e.j, e.at_i, e.at_j);
                if (e.at_i == Mark::Arrow && e.at_j == Mark::Arrow) flagged.emplace(e.i, e.j);
                continue;
            }
            Mark cur_i = r.graph.endpoint(e.j, e.i), cur_j = r.graph.endpoint(e.i, e.j);
            if (cur_i == e.at_i && cur_j == e.at_j) continue;
            bool cur_undirected = cur_i == Mark::Tail && cur_j == Mark::Tail;
            bool new_undirected = e.at_i == Mark::Tail && e.at_j == Mark::Tail;
            bool cur_bidirected = cur_i == Mark::Arrow && cur_j == Mark::Arrow;
            bool new_bidirected = e.at_i == Mark::Arrow && e.at_j == Mark::Arrow;
            if (cur_bidirected) continue;
            if (new_bidirected) {
                r.graph.add_bidirected(e.i, e.j);
                flagged.emplace(e.i, e.j);
            } else if (cur_undirected) {
                r.graph.set_edge(e.i, e.j, e.at_i, e.at_j);
            } else if (!new_undirected) {
                r.graph.add_undirected(e.i, e.j);
                flagged.emplace(e.i, e.j);
            }
        }
    }
    r.conflicts.assign(flagged.begin(), flagged.end());
    r.timing_ms["local"] = elapsed_ms(t0);
    r.ci_tests = tester.count() - before;
    r.singular_tests = tester.singular_count() - singular_before;
    return r;
}

DiscoveryResult run_snl(const CiTester& tester, const TargetSpec& t, const MbConfig& mb, const DiscoveryConfig& cfg) {
    if (!tester.is_session()) return in_session(tester, [&](const CiTester& s) { return run_snl(s, t, mb, cfg); });
    return with_blankets(tester, t, mb, [&](const NeighborSets& nbs) { return run_snl_given(tester, nbs, cfg); });
}

DiscoveryResult run_pc(const CiTester& tester, const DiscoveryConfig& cfg) {
    if (!tester.is_session()) return in_session(tester, [&](const CiTester& s) { return run_pc(s, cfg); });
    cfg.validate();
    DiscoveryResult r;
    r.algorithm = "pc";
    const long long before = tester.count();
    const long long singular_before = tester.singular_count();
    auto t0 = Clock::now();
    NodeSet all(static_cast<std::size_t>(tester.size()));
    for (int v = 0; v < tester.size(); ++v) all[static_cast<std::size_t>(v)] = v;
    r.graph = complete_graph(tester.size(), all, tester_names(tester));
    stable_skeleton(r.graph, r.sepsets, tester, cfg, PoolMode::Separate);
    r.timing_ms["skeleton"] = elapsed_ms(t0);
    t0 = Clock::now();
    r.conflicts = orient_pc_v_structures(r.graph, r.sepsets);
    meek_closure(r.graph);
    r.timing_ms["orientation"] = elapsed_ms(t0);
    r.ci_tests = tester.count() - before;
    r.singular_tests = tester.singular_count() - singular_before;
    return r;
}

nlohmann::json result_to_json(const DiscoveryResult& r, bool with_timing) {
    nlohmann::json doc = graph_to_json(r.graph);
    nlohmann::json seps = nlohmann::json::array();
    for (const auto& [pair, s] : r.sepsets.entries()) seps.push_back({pair.first, pair.second, s});
    nlohmann::json flags = nlohmann::json::array();
    for (auto [i, j] : r.conflicts) flags.push_back({{"kind", "conflict"}, {"edge", {i, j}}});
    if (r.singular_tests > 0) flags.push_back({{"kind", "singular_submatrix"}, {"count", r.singular_tests}});
    doc["algorithm"] = r.algorithm;
    doc["sepsets"] = seps;
    doc["ci_tests"] = r.ci_tests;
    doc["mb_tests"] = r.mb_tests;
    doc["flags"] = flags;
    if (with_timing) doc["timing_ms"] = r.timing_ms;
    return doc;
}

}  // namespace cml
