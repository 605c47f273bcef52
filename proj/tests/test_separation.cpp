#include <doctest.h>

#include "cml/rng.hpp"
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

TEST_CASE("Fig. 1 separation facts") {
    Dag g = oracle::fig1_dag();
    CHECK(d_separated(g, n(1), n(2), labels({13})));
    CHECK_FALSE(d_separated(g, n(1), n(2), labels({13, 3})));
    CHECK_FALSE(d_separated(g, n(1), n(2), {}));
    CHECK(markov_blanket(g, n(3)) == labels({1, 2, 4, 5}));
    CHECK(markov_blanket(g, n(8)) == labels({7, 9, 10}));
    CHECK(markov_blanket(g, n(1)) == labels({2, 3, 13}));
    CHECK(ancestors(g.graph(), n(9)) == labels({1, 2, 3, 4, 6, 9, 11, 12, 13}));
}

TEST_CASE("d-separation agrees with path enumeration on random DAGs") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        const int p = 4 + static_cast<int>(seed % 5);
        Dag g = random_dag(p, 2.5, seed);
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                NodeSet rest;
                for (int v = 0; v < p; ++v)
                    if (v != i && v != j) rest.push_back(v);
                for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << rest.size()); ++mask) {
                    NodeSet s;
                    for (std::size_t k = 0; k < rest.size(); ++k)
                        if ((mask >> k) & 1) s.push_back(rest[k]);
                    REQUIRE(d_separated(g, i, j, s) == !oracle::path_connected(g.graph(), i, j, s));
                    ++checked;
                }
            }
    }
    CHECK(checked > 10000);
}

TEST_CASE("m-separation agrees with path enumeration on random ancestral graphs") {
    for (std::uint64_t seed = 1; seed <= 80; ++seed) {
        const int p = 4 + static_cast<int>(seed % 4);
        MixedGraph g = oracle::random_ancestral(p, seed);
        REQUIRE(is_ancestral(g));
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                NodeSet rest;
                for (int v = 0; v < p; ++v)
                    if (v != i && v != j) rest.push_back(v);
                for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << rest.size()); ++mask) {
                    NodeSet s;
                    for (std::size_t k = 0; k < rest.size(); ++k)
                        if ((mask >> k) & 1) s.push_back(rest[k]);
                    REQUIRE(m_separated(g, i, j, s) == !oracle::path_connected(g, i, j, s));
                }
            }
    }
}

TEST_CASE("m-separation rejects non-ancestral input") {
    MixedGraph g(3);
    g.add_directed(0, 1);
    g.add_directed(1, 2);
    g.add_bidirected(0, 2);
    CHECK_FALSE(is_ancestral(g));
    CHECK_THROWS_AS(m_separated(g, 0, 2, {}), NotAncestral);
    MixedGraph c(2);
    c.set_edge(0, 1, Mark::Circle, Mark::Arrow);
    CHECK_FALSE(is_ancestral(c));
}

TEST_CASE("inducing paths in the running example") {
    Dag g = oracle::fig1_dag();
    NodeSet latent = labels({6, 11, 12, 13});
    CHECK(inducing_path_exists(g, n(2), n(9), latent));
    CHECK(inducing_path_exists(g, n(4), n(9), latent));
    // 1 <- 13 -> 2 <- 12 -> 9, with 2 an ancestor of 9 through 3 -> 4 -> 6 -> 11 -> 9.
    CHECK(inducing_path_exists(g, n(1), n(9), latent));
    CHECK_FALSE(inducing_path_exists(g, n(3), n(9), latent));
    CHECK_FALSE(inducing_path_exists(g, n(5), n(9), latent));
    CHECK_FALSE(inducing_path_exists(g, n(7), n(10), latent));
}

TEST_CASE("ground-truth MAG of the running example") {
    Dag g = oracle::fig1_dag();
    TargetSpec t({n(3), n(8)}, 13);
    MixedGraph mag = ground_truth_mag(g, t);
    MixedGraph expected = oracle::fig1c();
    expected.add_directed(n(1), n(9));
    CHECK(mag == expected);
    CHECK(validate_mag(mag.induced(labels({1, 2, 3, 4, 5, 7, 8, 9, 10}))));
    CHECK(check_assumption_inp(g, t));
}

TEST_CASE("validate_mag detects violations") {
    MixedGraph g(3);
    g.add_directed(0, 1);
    g.add_bidirected(1, 2);
    g.add_directed(2, 0);
    CHECK_FALSE(validate_mag(g));
    MixedGraph chain(3);
    chain.add_directed(0, 1);
    chain.add_directed(1, 2);
    CHECK(validate_mag(chain));
    // 0 <-> 1 <-> 2 <-> 3 with 1 -> 3 and 2 -> 0 is ancestral, but 0 and 3
    // are joined by an inducing path.
    MixedGraph nm(4);
    nm.add_bidirected(0, 1);
    nm.add_bidirected(1, 2);
    nm.add_bidirected(2, 3);
    nm.add_directed(1, 3);
    nm.add_directed(2, 0);
    CHECK(is_ancestral(nm));
    CHECK_FALSE(validate_mag(nm));
}
