#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cml/ci.hpp"
#include "cml/graph.hpp"
#include "cml/neighbors.hpp"
#include "cml/orientation.hpp"

namespace cml {

struct DiscoveryConfig {
    double alpha_skel = 0.01;
    /// Largest conditioning-set size tried in skeleton searches.
    int lmax = 3;
    RuleToggles rules;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Skeleton {
    MixedGraph graph;
    SepsetMap sepsets;
};

struct DiscoveryResult {
    std::string algorithm;
    MixedGraph graph;
    SepsetMap sepsets;
    NeighborSets nbs;
    /// Skeletons after each phase (CML only; empty graphs otherwise).
    MixedGraph phase1;
    MixedGraph phase2;
    long long ci_tests = 0;
    /// Tests spent on Markov-blanket recovery, included in ci_tests.
    long long mb_tests = 0;
    long long singular_tests = 0;
    /// Pairs flagged as orientation conflicts: within-neighborhood <-> for CML
    /// and SNL, conflicting v-structures for PC, disagreeing neighborhoods for SNL.
    std::vector<std::pair<int, int>> conflicts;
    std::map<std::string, double> timing_ms;
};

/// Stable level-wise skeleton search over the complete graph on nbs.all. For
/// each level l = 0..lmax, each surviving edge is tested against the size-l
/// subsets of adj(i) + adj(j) - {i, j} in the adjacency snapshot taken at the
/// start of the level; removals are applied when the level ends.
Skeleton phase1_union_skeleton(const NeighborSets& nbs, const CiTester& tester, const DiscoveryConfig& cfg);

/// Per target in ascending order, each still-present edge with both ends in
/// NB[t] (each edge tested at most once) is tested against non-empty subsets of
/// N1[i] - {j} and N1[j] - {i}, size by size. Between-neighborhood edges stay.
Skeleton phase2_local_prune(Skeleton skel, const NeighborSets& nbs, const CiTester& tester, const DiscoveryConfig& cfg);

/// Circles, R0, rule closure, R_N, then the ancestral circle closure.
MixedGraph orient_cml(const MixedGraph& skeleton, const SepsetMap& sepsets, const NeighborSets& nbs,
                      const RuleToggles& rules = {});

DiscoveryResult run_cml(const CiTester& tester, const TargetSpec& t, const MbConfig& mb, const DiscoveryConfig& cfg);
/// CML with neighbor sets supplied by the caller (no Markov-blanket tests).
DiscoveryResult run_cml_given(const CiTester& tester, const NeighborSets& nbs, const DiscoveryConfig& cfg);

DiscoveryResult run_snl(const CiTester& tester, const TargetSpec& t, const MbConfig& mb, const DiscoveryConfig& cfg);
DiscoveryResult run_snl_given(const CiTester& tester, const NeighborSets& nbs, const DiscoveryConfig& cfg);

/// Stable PC over all nodes: subsets of adj(i) - {j}, then adj(j) - {i}; v-structures; Meek closure.
DiscoveryResult run_pc(const CiTester& tester, const DiscoveryConfig& cfg);

/// Graph document plus sepsets, test counts and conflict flags. Timing is
/// included only on request since it varies between runs.
nlohmann::json result_to_json(const DiscoveryResult& r, bool with_timing);

}  // namespace cml
