#include <doctest.h>

#include "cml/cpdag.hpp"
#include "cml/discovery.hpp"
#include "cml/metrics.hpp"
#include "cml/parallel.hpp"
#include "cml/simgen.hpp"
#include "oracles.hpp"
#include "reference.hpp"

using namespace cml;
using oracle::n;

namespace {

std::set<std::pair<int, int>> adjacencies(const MixedGraph& g) {
    std::set<std::pair<int, int>> out;
    for (const auto& e : g.edges()) out.emplace(e.i, e.j);
    return out;
}

std::pair<int, int> pair_of(int a, int b) { return {std::min(n(a), n(b)), std::max(n(a), n(b))}; }

const TargetSpec kFig1Targets({2, 7}, 13);

}  // namespace

TEST_CASE("phase 1 on the running example") {
    CiTester t = CiTester::oracle(oracle::fig1_dag());
    NeighborSets nbs = true_neighbor_sets(oracle::fig1_dag(), kFig1Targets);
    DiscoveryConfig cfg;
    Skeleton s1 = phase1_union_skeleton(nbs, t, cfg);
    auto expected = adjacencies(oracle::fig1c());
    expected.insert(pair_of(1, 2));
    expected.insert(pair_of(1, 9));
    CHECK(adjacencies(s1.graph) == expected);

    Skeleton s2 = phase2_local_prune(s1, nbs, t, cfg);
    auto after = adjacencies(s2.graph);
    expected.erase(pair_of(1, 2));
    CHECK(after == expected);
    REQUIRE(s2.sepsets.find(n(1), n(2)));
    CHECK(*s2.sepsets.find(n(1), n(2)) == NodeSet{n(13)});
}

TEST_CASE("CML on the running example equals the reference PAG") {
    CiTester t = CiTester::oracle(oracle::fig1_dag());
    DiscoveryResult r = run_cml(t, kFig1Targets, MbConfig{}, DiscoveryConfig{});
    MixedGraph reference = oracle::reference_pag(oracle::fig1_dag(), kFig1Targets);
    CHECK(r.graph == reference);
    MixedGraph expected = oracle::fig1c();
    expected.add_directed(n(1), n(9));
    CHECK(r.graph == expected);
    CHECK(bne_count(r.graph, r.nbs) == 3);
    CHECK(r.conflicts.empty());
    CHECK(r.ci_tests >= r.mb_tests);
    CHECK(t.count() == r.ci_tests);
}

TEST_CASE("SNL on the running example") {
    CiTester t = CiTester::oracle(oracle::fig1_dag());
    DiscoveryResult r = run_snl(t, kFig1Targets, MbConfig{}, DiscoveryConfig{});
    CHECK(r.graph == oracle::fig1d());
    CHECK(bne_count(r.graph, r.nbs) == 0);
}

TEST_CASE("oracle PC recovers the CPDAG") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const int p = 6 + static_cast<int>(seed % 15);
        Dag g = random_dag(p, 2.0, seed);
        CiTester t = CiTester::oracle(g);
        DiscoveryConfig cfg;
        cfg.lmax = p;
        DiscoveryResult r = run_pc(t, cfg);
        INFO("seed " << seed);
        CHECK(r.graph == cpdag(g));
        CHECK(r.conflicts.empty());
    }
}

TEST_CASE("oracle CML matches the reference PAG on random DAGs") {
    int compared = 0;
    for (std::uint64_t seed = 1; compared < 25 && seed < 400; ++seed) {
        const int p = 8 + static_cast<int>(seed % 10);
        Dag g = random_dag(p, 2.0, seed);
        TargetSpec t({static_cast<int>(seed % static_cast<std::uint64_t>(p)), static_cast<int>((seed + p / 2) % static_cast<std::uint64_t>(p))}, p);
        if (!check_assumption_inp(g, t)) continue;
        CiTester tester = CiTester::oracle(g);
        DiscoveryConfig cfg;
        cfg.lmax = p;
        MbConfig mb;
        mb.lmax = p;
        INFO("seed " << seed);
        CHECK(run_cml(tester, t, mb, cfg).graph == oracle::reference_pag(g, t));
        ++compared;
    }
    CHECK(compared == 25);
}

TEST_CASE("results do not depend on the thread count") {
    Dag g = random_dag(60, 2.0, 3);
    SimConfig sim;
    sim.seed = 3;
    Dataset d = simulate_data(g, sample_params(g, sim), 500, 3);
    CiTester tester = CiTester::fisher_z(covariance(d));
    TargetSpec t({5, 40}, 60);
    std::string first;
    for (int threads : {1, 4}) {
        set_num_threads(threads);
        std::string doc = result_to_json(run_cml(tester, t, MbConfig{}, DiscoveryConfig{}), false).dump() +
                          result_to_json(run_snl(tester, t, MbConfig{}, DiscoveryConfig{}), false).dump() +
                          result_to_json(run_pc(tester, DiscoveryConfig{}), false).dump();
        if (first.empty())
            first = doc;
        else
            CHECK(doc == first);
    }
    set_num_threads(1);
}

TEST_CASE("discovery configuration is validated") {
    CiTester t = CiTester::oracle(oracle::fig1_dag());
    DiscoveryConfig bad;
    bad.alpha_skel = 1.5;
    CHECK_THROWS_AS(run_pc(t, bad), InvalidArgument);
    bad.alpha_skel = 0.01;
    bad.lmax = -1;
    CHECK_THROWS_AS(run_cml(t, kFig1Targets, MbConfig{}, bad), InvalidArgument);
}
