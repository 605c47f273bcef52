#include "cml/metrics.hpp"

#include "cml/cpdag.hpp"
#include "cml/separation.hpp"

namespace cml {

EdgeStatus edge_status(const MixedGraph& g, int i, int j) {
    const Mark at_j = g.endpoint(i, j);
    const Mark at_i = g.endpoint(j, i);
    if (at_j == Mark::None) return EdgeStatus::Absent;
    const bool arrow_i = at_i == Mark::Arrow, arrow_j = at_j == Mark::Arrow;
    if (arrow_i && arrow_j) return EdgeStatus::Bidirected;
    if (arrow_j) return EdgeStatus::Forward;
    if (arrow_i) return EdgeStatus::Backward;
    return EdgeStatus::Undirected;
}

const char* pair_class_name(PairClass c) {
    switch (c) {
        case PairClass::TP: return "TP";
        case PairClass::IO: return "IO";
        case PairClass::FP: return "FP";
        case PairClass::FN: return "FN";
        case PairClass::TN: return "TN";
    }
    return "?";
}

NodeSet truth_universe(const Dag& g, const TargetSpec& t) {
    NodeSet nb;
    for (const auto& s : true_neighborhoods(g, t)) nb = nodeset::unite(nb, s);
    return nb;
}

MixedGraph truth_subgraph(const Dag& g, const TargetSpec& t) { return cpdag(g).induced(truth_universe(g, t)); }

namespace {

NodeSet all_nodes(int p) {
    NodeSet out(static_cast<std::size_t>(p));
    for (int v = 0; v < p; ++v) out[static_cast<std::size_t>(v)] = v;
    return out;
}

void check_universe(const MixedGraph& est, const MixedGraph& truth, const NodeSet& universe) {
    if (est.size() != truth.size()) throw InvalidArgument("estimate and truth have different node counts");
    for (int v : universe) truth.check_node(v);
}

}  // namespace

EdgeTally classify_pairs(const MixedGraph& est, const MixedGraph& truth, const NodeSet& universe) {
    check_universe(est, truth, universe);
    EdgeTally out;
    for (std::size_t a = 0; a < universe.size(); ++a) {
        for (std::size_t b = a + 1; b < universe.size(); ++b) {
            int i = universe[a], j = universe[b];
            EdgeStatus se = edge_status(est, i, j), st = edge_status(truth, i, j);
            PairClass c;
            if (se == EdgeStatus::Absent && st == EdgeStatus::Absent)
                continue;
            else if (st == EdgeStatus::Absent)
                c = PairClass::FP, ++out.fp;
            else if (se == EdgeStatus::Absent)
                c = PairClass::FN, ++out.fn;
            else if (se == st)
                c = PairClass::TP, ++out.tp;
            else
                c = PairClass::IO, ++out.io;
            out.rows.push_back({i, j, c});
        }
    }
    return out;
}

double overall_f1(const MixedGraph& est, const MixedGraph& truth, const NodeSet& universe) {
    auto t = classify_pairs(est, truth, universe);
    const int denom = 2 * t.tp + t.fp + t.fn + t.io;
    return denom == 0 ? 1.0 : 2.0 * t.tp / denom;
}

double overall_f1(const MixedGraph& est, const MixedGraph& truth) {
    return overall_f1(est, truth, all_nodes(truth.size()));
}

int shd(const MixedGraph& est, const MixedGraph& truth, const NodeSet& universe) {
    auto t = classify_pairs(est, truth, universe);
    return t.io + t.fp + t.fn;
}

int shd(const MixedGraph& est, const MixedGraph& truth) { return shd(est, truth, all_nodes(truth.size())); }

double pra_f1(const MixedGraph& est, const MixedGraph& truth, const TargetSpec& t, PraMode mode) {
    if (est.size() != truth.size()) throw InvalidArgument("estimate and truth have different node counts");
    int tp = 0, fp = 0, fn = 0;
    for (int target : t) {
        truth.check_node(target);
        NodeSet true_pa = truth.parents(target);
        for (int x = 0; x < est.size(); ++x) {
            if (x == target) continue;
            const bool is_parent = nodeset::contains(true_pa, x);
            const EdgeStatus s = edge_status(est, x, target);
            if (s == EdgeStatus::Forward) {
                is_parent ? ++tp : ++fp;
            } else if (is_parent && (s == EdgeStatus::Undirected || s == EdgeStatus::Bidirected)) {
                if (mode == PraMode::Loose)
                    ++tp;
                else
                    fn += 2;
            } else if (is_parent) {
                ++fn;
            }
        }
    }
    const int denom = 2 * tp + fp + fn;
    return denom == 0 ? 1.0 : 2.0 * tp / denom;
}

int bne_count(const MixedGraph& g, const NeighborSets& nbs) {
    int count = 0;
    for (const auto& e : g.edges())
        if (!nbs.same_neighborhood(e.i, e.j)) ++count;
    return count;
}

MetricsReport score(const DiscoveryResult& r, const Dag& g, const TargetSpec& t) {
    MetricsReport m;
    const NodeSet universe = truth_universe(g, t);
    const MixedGraph truth = cpdag(g).induced(universe);
    m.tally = classify_pairs(r.graph, truth, universe);
    const int denom = 2 * m.tally.tp + m.tally.fp + m.tally.fn + m.tally.io;
    m.overall_f1 = denom == 0 ? 1.0 : 2.0 * m.tally.tp / denom;
    m.shd = m.tally.io + m.tally.fp + m.tally.fn;
    m.pra_f1_loose = pra_f1(r.graph, truth, t, PraMode::Loose);
    m.pra_f1_strict = pra_f1(r.graph, truth, t, PraMode::Strict);
    m.bne_count = r.algorithm == "pc" ? 0 : bne_count(r.graph, r.nbs);
    m.ci_tests = r.ci_tests;
    m.mb_tests = r.mb_tests;
    m.singular_tests = r.singular_tests;
    m.conflicts = static_cast<int>(r.conflicts.size());
    for (const auto& [stage, ms] : r.timing_ms) m.runtime_ms += ms;
    return m;
}

nlohmann::json tally_to_json(const EdgeTally& tally) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : tally.rows) rows.push_back({row.i, row.j, pair_class_name(row.cls)});
    return {{"tp", tally.tp}, {"io", tally.io}, {"fp", tally.fp}, {"fn", tally.fn}, {"pairs", rows}};
}

}  // namespace cml
