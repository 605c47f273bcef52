#include <doctest.h>

#include "cml/neighbors.hpp"
#include "cml/separation.hpp"
#include "cml/simgen.hpp"
#include "oracles.hpp"

using namespace cml;
using oracle::n;

namespace {

NodeSet labels(std::initializer_list<int> ls) {
    NodeSet out;
    for (int l : ls) out.push_back(l - 1);
    return nodeset::make(out);
}

}  // namespace

TEST_CASE("parents and children in the running example") {
    CiTester t = CiTester::oracle(oracle::fig1_dag());
    CHECK(estimate_parents_children(n(3), t, 0.01, 3) == labels({1, 2, 4, 5}));
    CHECK(estimate_parents_children(n(1), t, 0.01, 3) == labels({3, 13}));
    CHECK(estimate_parents_children(n(8), t, 0.01, 3) == labels({7, 9, 10}));
}

TEST_CASE("isolated node has no neighbors") {
    CiTester t = CiTester::oracle(Dag(3, {{0, 1}}));
    CHECK(estimate_parents_children(2, t, 0.01, 3).empty());
}

TEST_CASE("spouse rule") {
    CiTester t = CiTester::oracle(oracle::fig1_dag());
    CHECK(estimate_spouses(n(1), labels({3, 13}), t, 0.01, 3) == labels({2}));
    CHECK(estimate_spouses(n(3), labels({1, 2, 4, 5}), t, 0.01, 3).empty());
    CHECK(estimate_spouses(n(5), labels({3}), t, 0.01, 3).empty());
}

TEST_CASE("neighbor sets of the running example") {
    CiTester t = CiTester::oracle(oracle::fig1_dag());
    TargetSpec targets({n(3), n(8)}, 13);
    NeighborSets nbs = build_neighbor_sets(targets, t, 0.01, 3);
    CHECK(nbs.first(n(3)) == labels({1, 2, 4, 5}));
    CHECK(nbs.first(n(8)) == labels({7, 9, 10}));
    NodeSet second;
    for (const auto& s : nbs.n2) second = nodeset::unite(second, s);
    CHECK(second == labels({6, 11, 12, 13}));
    CHECK(nbs.all == labels({1, 2, 3, 4, 5, 7, 8, 9, 10}));
    CHECK(nbs.same_neighborhood(n(1), n(2)));
    CHECK_FALSE(nbs.same_neighborhood(n(2), n(9)));
    NeighborSets truth = true_neighbor_sets(oracle::fig1_dag(), targets);
    CHECK(truth.n1 == nbs.n1);
}

TEST_CASE("oracle blankets equal true blankets on random DAGs") {
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
        const int p = 8 + static_cast<int>(seed % 23);
        Dag g = random_dag(p, 1.0 + static_cast<double>(seed % 3), seed);
        CiTester t = CiTester::oracle(g);
        const int a = static_cast<int>(seed % static_cast<std::uint64_t>(p));
        const int b = static_cast<int>((seed * 7 + 3) % static_cast<std::uint64_t>(p));
        TargetSpec targets(a == b ? std::vector<int>{a} : std::vector<int>{a, b}, p);
        NeighborSets nbs = build_neighbor_sets(targets, t, 0.01, p);
        for (const auto& [v, mb] : nbs.n1) {
            INFO("seed " << seed << " node " << v);
            REQUIRE(mb == markov_blanket(g, v));
        }
        for (std::size_t k = 0; k < nbs.targets.size(); ++k)
            CHECK(nodeset::intersect(nbs.n2[k], nbs.nb[k]).empty());
    }
}

TEST_CASE("invalid configuration is rejected") {
    CiTester t = CiTester::oracle(oracle::fig1_dag());
    CHECK_THROWS_AS(estimate_parents_children(20, t, 0.01, 3), InvalidArgument);
    CHECK_THROWS_AS(MbEstimator(t, MbConfig{1.5, 3}), InvalidArgument);
}
