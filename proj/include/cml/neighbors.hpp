#pragma once

#include <map>
#include <vector>

#include <json.hpp>

#include "cml/ci.hpp"
#include "cml/graph.hpp"

namespace cml {

struct MbConfig {
    double alpha = 0.01;
    int lmax = 3;

    void validate() const;
};

/// Forward-backward search result for a single node v.
struct PcSearch {
    /// Candidate parents/children, before the symmetry check.
    NodeSet cpc;
    /// For every node eliminated during the search, the first set that separated it from v.
    std::map<int, NodeSet> sepsets;
};

/// Forward phase: every other node starts as a candidate. Each round tests the
/// live candidates against the subsets (size <= lmax) of the current set that
/// contain its newest member, keeping the largest p-value seen per candidate;
/// candidates found independent are dropped for good. The candidate with the
/// smallest running maximum p-value (lowest index on ties) joins the set.
/// Backward phase: members in ascending index order are removed when some
/// subset of the remaining members separates them from v; subsets already
/// tested during the forward phase are skipped.
PcSearch search_candidate_pc(int v, const CiTester& tester, double alpha, int lmax);

/// Memoizing front-end for the Markov-blanket searches of many nodes.
/// Parents/children of v are the candidates x of v with v also a candidate of x.
class MbEstimator {
public:
    MbEstimator(const CiTester& tester, MbConfig cfg);

    const PcSearch& search(int v);
    /// Runs the missing searches for `nodes` concurrently.
    void prefetch(const NodeSet& nodes);
    NodeSet parents_children(int v);
    /// Spouse rule: for c in pc and s in the candidate set of c minus pc + v,
    /// s is a spouse when
    /// v and s have a separating set S (recorded during v's search, otherwise
    /// the first subset of pc up to size lmax found to separate them) and v, s
    /// are dependent given S + c.
    NodeSet spouses(int v, const NodeSet& pc);
    /// pc(v) + spouses(v) for each node, searches batched across nodes.
    std::map<int, NodeSet> blankets(const NodeSet& nodes);

private:
    const PcSearch* cached(int v) const;

    const CiTester& tester_;
    MbConfig cfg_;
    std::map<int, PcSearch> memo_;
};

NodeSet estimate_parents_children(int t, const CiTester& tester, double alpha, int lmax);
NodeSet estimate_spouses(int t, const NodeSet& pc, const CiTester& tester, double alpha, int lmax);

/// First- and second-order neighbor sets for a target set.
struct NeighborSets {
    /// Targets in ascending order; the per-target vectors below follow it.
    std::vector<int> targets;
    std::vector<NodeSet> nb;
    std::vector<NodeSet> n2;
    /// N1 for every target and every member of a neighborhood.
    std::map<int, NodeSet> n1;
    /// N = union of the neighborhoods.
    NodeSet all;
    /// N plus every second-order neighbor.
    NodeSet all12;

    const NodeSet& first(int v) const;
    bool same_neighborhood(int a, int b) const;
};

/// Assembles the derived sets. `n1` must cover every target and every member
/// of every NB[t] = n1[t] + t.
NeighborSets make_neighbor_sets(const TargetSpec& t, std::map<int, NodeSet> n1);

NeighborSets build_neighbor_sets(const TargetSpec& t, const CiTester& tester, double alpha, int lmax);
/// Neighbor sets from the true Markov blankets of g.
NeighborSets true_neighbor_sets(const Dag& g, const TargetSpec& t);

nlohmann::json neighbor_sets_to_json(const NeighborSets& nbs);

}  // namespace cml
