#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cml/discovery.hpp"
#include "cml/graph.hpp"

namespace cml {

/// Scoring status of a pair. Circle marks are read as: o-o and o- undirected,
/// o-> directed toward the arrowhead.
enum class EdgeStatus { Absent, Undirected, Forward, Backward, Bidirected };

/// Status of the pair (i, j); Forward means i -> j.
EdgeStatus edge_status(const MixedGraph& g, int i, int j);

enum class PairClass { TP, IO, FP, FN, TN };

const char* pair_class_name(PairClass c);

struct PairRow {
    int i;
    int j;
    PairClass cls;
};

struct EdgeTally {
    int tp = 0, io = 0, fp = 0, fn = 0;
    /// Every non-TN pair of the universe, ascending (i, j).
    std::vector<PairRow> rows;
};

/// cpdag(g) restricted to the true NB_T.
MixedGraph truth_subgraph(const Dag& g, const TargetSpec& t);
/// Nodes of the true NB_T.
NodeSet truth_universe(const Dag& g, const TargetSpec& t);

/// Classifies each pair of `universe`: TP when both graphs have the same
/// status, IO when both have an edge with different statuses, FP / FN when
/// only the estimate / only the truth has an edge.
EdgeTally classify_pairs(const MixedGraph& est, const MixedGraph& truth, const NodeSet& universe);

/// 2TP / (2TP + FP + FN + IO); 1 when the denominator is 0.
double overall_f1(const MixedGraph& est, const MixedGraph& truth, const NodeSet& universe);
double overall_f1(const MixedGraph& est, const MixedGraph& truth);

/// Number of pairs of `universe` whose status differs.
int shd(const MixedGraph& est, const MixedGraph& truth, const NodeSet& universe);
int shd(const MixedGraph& est, const MixedGraph& truth);

enum class PraMode { Loose, Strict };

/// Parent recovery F1 pooled over the targets. Truth parents are the
/// directed parents in `truth`; estimated parents are the nodes whose edge to
/// the target scores as directed into it. An undirected or bidirected
/// estimated edge to a true parent is a TP in loose mode; in strict mode it
/// adds a FN on top of the FN for the unrecovered parent.
double pra_f1(const MixedGraph& est, const MixedGraph& truth, const TargetSpec& t, PraMode mode);

/// Edges whose endpoints share no neighborhood of `nbs`.
int bne_count(const MixedGraph& g, const NeighborSets& nbs);

struct MetricsReport {
    double overall_f1 = 0.0;
    int shd = 0;
    double pra_f1_loose = 0.0;
    double pra_f1_strict = 0.0;
    int bne_count = 0;
    long long ci_tests = 0;
    long long mb_tests = 0;
    long long singular_tests = 0;
    int conflicts = 0;
    double runtime_ms = 0.0;
    EdgeTally tally;
};

/// Scores a discovery result against the truth subgraph of (g, t).
MetricsReport score(const DiscoveryResult& r, const Dag& g, const TargetSpec& t);

nlohmann::json tally_to_json(const EdgeTally& tally);

}  // namespace cml
