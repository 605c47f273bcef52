#include "cml/neighbors.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "cml/parallel.hpp"
#include "cml/separation.hpp"
#include "cml/subsets.hpp"

namespace cml {

void MbConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha_mb must lie in (0, 1)");
    if (lmax < 0) throw InvalidArgument("lmax must be non-negative");
}

PcSearch search_candidate_pc(int v, const CiTester& tester, double alpha, int lmax) {
    const int p = tester.size();
    if (v < 0 || v >= p) throw InvalidArgument("target index out of range");
    if (lmax < 0) throw InvalidArgument("lmax must be non-negative");

    PcSearch out;
    std::vector<int> added;  // members in the order they joined
    std::vector<int> live;
    for (int x = 0; x < p; ++x)
        if (x != v) live.push_back(x);
    std::vector<double> max_p(static_cast<std::size_t>(p), -1.0);
    std::optional<int> newest;

    for (;;) {
        std::vector<int> still;
        NodeSet others = nodeset::make(added);
        if (newest) others = nodeset::without(others, *newest);
        for (int x : live) {
            auto& mp = max_p[static_cast<std::size_t>(x)];
            auto check = [&](const NodeSet& s) {
                auto d = tester.test(v, x, s, alpha);
                mp = std::max(mp, d.p_value);
                if (d.independent) {
                    out.sepsets.emplace(x, s);
                    return true;
                }
                return false;
            };
            bool dropped = false;
            if (!newest) {
                dropped = check(NodeSet{});
            } else {
                for (int k = 0; k < lmax && !dropped; ++k)
                    dropped = for_each_subset(others, k, [&](const NodeSet& r) { return check(nodeset::with(r, *newest)); });
            }
            if (!dropped) still.push_back(x);
        }
        live = std::move(still);
        if (live.empty()) break;
        int best = live.front();
        for (int x : live)
            if (max_p[static_cast<std::size_t>(x)] < max_p[static_cast<std::size_t>(best)]) best = x;
        added.push_back(best);
        live.erase(std::find(live.begin(), live.end(), best));
        newest = best;
    }

    std::vector<int> rank(static_cast<std::size_t>(p), -1);
    for (std::size_t r = 0; r < added.size(); ++r) rank[static_cast<std::size_t>(added[r])] = static_cast<int>(r);
    NodeSet cpc = nodeset::make(added);
    for (int m : NodeSet(cpc)) {
        NodeSet rest = nodeset::without(cpc, m);
        const int mr = rank[static_cast<std::size_t>(m)];
        bool removed = false;
        for (int k = 1; k <= std::min<int>(lmax, static_cast<int>(rest.size())) && !removed; ++k) {
            removed = for_each_subset(rest, k, [&](const NodeSet& s) {
                bool seen = std::all_of(s.begin(), s.end(), [&](int y) { return rank[static_cast<std::size_t>(y)] < mr; });
                if (seen) return false;
                if (tester.test(v, m, s, alpha).independent) {
                    out.sepsets.emplace(m, s);
                    return true;
                }
                return false;
            });
        }
        if (removed) cpc = rest;
    }
    out.cpc = std::move(cpc);
    return out;
}

MbEstimator::MbEstimator(const CiTester& tester, MbConfig cfg) : tester_(tester), cfg_(cfg) { cfg_.validate(); }

const PcSearch* MbEstimator::cached(int v) const {
    auto it = memo_.find(v);
    return it == memo_.end() ? nullptr : &it->second;
}

const PcSearch& MbEstimator::search(int v) {
    if (const auto* hit = cached(v)) return *hit;
    return memo_.emplace(v, search_candidate_pc(v, tester_, cfg_.alpha, cfg_.lmax)).first->second;
}

void MbEstimator::prefetch(const NodeSet& nodes) {
    NodeSet missing;
    for (int v : nodes)
        if (!cached(v)) missing.push_back(v);
    std::vector<PcSearch> results(missing.size());
    parallel_for(missing.size(), [&](std::size_t k) {
        results[k] = search_candidate_pc(missing[k], tester_, cfg_.alpha, cfg_.lmax);
    });
    for (std::size_t k = 0; k < missing.size(); ++k) memo_.emplace(missing[k], std::move(results[k]));
}

NodeSet MbEstimator::parents_children(int v) {
    NodeSet cpc = search(v).cpc;
    prefetch(cpc);
    NodeSet out;
    for (int x : cpc)
        if (nodeset::contains(search(x).cpc, v)) out.push_back(x);
    return out;
}

namespace {

// Spouse candidates come from the candidate sets of v's parents/children,
// which are already memoized; only CI tests run here. `searches` must cover
// pc and every member of own.cpc.
NodeSet spouse_tests(int v, const NodeSet& pc, const std::map<int, const PcSearch*>& searches, const PcSearch& own,
                     const CiTester& tester, const MbConfig& cfg) {
    NodeSet found;
    std::map<int, std::optional<NodeSet>> fresh;
    auto separator = [&](int s) -> std::optional<NodeSet> {
        auto rec = own.sepsets.find(s);
        if (rec != own.sepsets.end()) return rec->second;
        // A candidate that survived v's search but is not a true neighbor was
        // usually separated from v in its own search.
        if (auto other = searches.find(s); other != searches.end()) {
            auto back = other->second->sepsets.find(v);
            if (back != other->second->sepsets.end()) return back->second;
        }
        auto it = fresh.find(s);
        if (it != fresh.end()) return it->second;
        std::optional<NodeSet> result;
        for (int k = 0; k <= std::min<int>(cfg.lmax, static_cast<int>(pc.size())) && !result; ++k)
            for_each_subset(pc, k, [&](const NodeSet& sub) {
                if (tester.test(v, s, sub, cfg.alpha).independent) {
                    result = sub;
                    return true;
                }
                return false;
            });
        fresh.emplace(s, result);
        return result;
    };
    for (int c : pc) {
        for (int s : searches.at(c)->cpc) {
            if (s == v || nodeset::contains(pc, s) || nodeset::contains(found, s)) continue;
            auto sep = separator(s);
            if (!sep) continue;
            if (!tester.test(v, s, nodeset::with(*sep, c), cfg.alpha).independent) found = nodeset::with(found, s);
        }
    }
    return found;
}

}  // namespace

NodeSet MbEstimator::spouses(int v, const NodeSet& pc) {
    const PcSearch& own = search(v);
    NodeSet needed = nodeset::unite(pc, own.cpc);
    prefetch(needed);
    std::map<int, const PcSearch*> searches;
    for (int x : needed) searches.emplace(x, &search(x));
    return spouse_tests(v, pc, searches, own, tester_, cfg_);
}

std::map<int, NodeSet> MbEstimator::blankets(const NodeSet& nodes) {
    // Stage the searches so each batch runs in parallel: the nodes, then
    // their candidates.
    prefetch(nodes);
    NodeSet level1;
    for (int v : nodes) level1 = nodeset::unite(level1, search(v).cpc);
    prefetch(level1);

    std::map<int, NodeSet> pc_of;
    std::map<int, const PcSearch*> searches;
    for (int v : nodes) pc_of.emplace(v, parents_children(v));
    for (int x : nodeset::unite(nodes, level1)) searches.emplace(x, &search(x));

    std::vector<NodeSet> sp(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
        int v = nodes[k];
        sp[k] = spouse_tests(v, pc_of.at(v), searches, *cached(v), tester_, cfg_);
    });
    std::map<int, NodeSet> out;
    for (std::size_t k = 0; k < nodes.size(); ++k) out.emplace(nodes[k], nodeset::unite(pc_of.at(nodes[k]), sp[k]));
    return out;
}

NodeSet estimate_parents_children(int t, const CiTester& tester, double alpha, int lmax) {
    MbEstimator est(tester, MbConfig{alpha, lmax});
    return est.parents_children(t);
}

NodeSet estimate_spouses(int t, const NodeSet& pc, const CiTester& tester, double alpha, int lmax) {
    MbEstimator est(tester, MbConfig{alpha, lmax});
    return est.spouses(t, pc);
}

const NodeSet& NeighborSets::first(int v) const {
    auto it = n1.find(v);
    if (it == n1.end()) throw InvalidArgument("no first-order neighbor set for node " + std::to_string(v));
    return it->second;
}

bool NeighborSets::same_neighborhood(int a, int b) const {
    for (const auto& s : nb)
        if (nodeset::contains(s, a) && nodeset::contains(s, b)) return true;
    return false;
}

NeighborSets make_neighbor_sets(const TargetSpec& t, std::map<int, NodeSet> n1) {
    NeighborSets out;
    out.targets = t.nodes();
    out.n1 = std::move(n1);
    for (int target : out.targets) {
        NodeSet nb = nodeset::with(out.first(target), target);
        NodeSet second;
        for (int j : out.first(target)) second = nodeset::unite(second, out.first(j));
        second = nodeset::minus(second, nb);
        out.all = nodeset::unite(out.all, nb);
        out.all12 = nodeset::unite(out.all12, nodeset::unite(nb, second));
        out.nb.push_back(std::move(nb));
        out.n2.push_back(std::move(second));
    }
    return out;
}

NeighborSets build_neighbor_sets(const TargetSpec& t, const CiTester& tester, double alpha, int lmax) {
    MbEstimator est(tester, MbConfig{alpha, lmax});
    auto n1 = est.blankets(t.nodes());
    NodeSet members;
    for (int target : t) members = nodeset::unite(members, n1.at(target));
    members = nodeset::minus(members, t.nodes());
    for (auto& [v, s] : est.blankets(members)) n1.emplace(v, std::move(s));
    return make_neighbor_sets(t, std::move(n1));
}

NeighborSets true_neighbor_sets(const Dag& g, const TargetSpec& t) {
    std::map<int, NodeSet> n1;
    for (int target : t) {
        auto mb = markov_blanket(g, target);
        n1.emplace(target, mb);
        for (int v : mb)
            if (!n1.count(v)) n1.emplace(v, markov_blanket(g, v));
    }
    return make_neighbor_sets(t, std::move(n1));
}

nlohmann::json neighbor_sets_to_json(const NeighborSets& nbs) {
    nlohmann::json targets = nlohmann::json::object();
    for (std::size_t k = 0; k < nbs.targets.size(); ++k) {
        int t = nbs.targets[k];
        targets[std::to_string(t)] = {{"n1", nbs.first(t)}, {"n2", nbs.n2[k]}};
    }
    nlohmann::json n1 = nlohmann::json::object();
    for (const auto& [v, s] : nbs.n1) n1[std::to_string(v)] = s;
    return {{"targets", targets}, {"n1", n1}};
}

}  // namespace cml
