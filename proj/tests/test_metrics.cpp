#include <doctest.h>

#include "cml/metrics.hpp"
#include "oracles.hpp"

using namespace cml;
using oracle::n;

namespace {
const TargetSpec kTargets({2, 7}, 13);
}

TEST_CASE("truth subgraph of the running example") {
    Dag g = oracle::fig1_dag();
    MixedGraph truth = truth_subgraph(g, kTargets);
    CHECK(truth_universe(g, kTargets) == NodeSet{0, 1, 2, 3, 4, 6, 7, 8, 9});
    CHECK(truth.num_edges() == 7);
    CHECK(truth.is_directed(n(1), n(3)));
    CHECK(truth.is_directed(n(9), n(8)));
    CHECK(truth.is_directed(n(8), n(10)));
}

TEST_CASE("scores of the printed CML and SNL outputs") {
    Dag g = oracle::fig1_dag();
    MixedGraph truth = truth_subgraph(g, kTargets);
    NodeSet universe = truth_universe(g, kTargets);
    NeighborSets nbs = true_neighbor_sets(g, kTargets);

    MixedGraph c = oracle::fig1c();
    CHECK(overall_f1(c, truth, universe) == doctest::Approx(14.0 / 16.0));
    CHECK(shd(c, truth, universe) == 2);
    CHECK(bne_count(c, nbs) == 2);
    CHECK(pra_f1(c, truth, kTargets, PraMode::Loose) == 1.0);
    CHECK(pra_f1(c, truth, kTargets, PraMode::Strict) == 1.0);

    MixedGraph d = oracle::fig1d();
    CHECK(overall_f1(d, truth, universe) == doctest::Approx(8.0 / 11.0));
    CHECK(shd(d, truth, universe) == 3);
    CHECK(bne_count(d, nbs) == 0);
    CHECK(pra_f1(d, truth, kTargets, PraMode::Loose) == 1.0);
    CHECK(pra_f1(d, truth, kTargets, PraMode::Strict) == doctest::Approx(2.0 / 3.0));

    auto tally = classify_pairs(d, truth, universe);
    CHECK(tally.tp == 4);
    CHECK(tally.io == 3);
    CHECK(tally.fp == 0);
    CHECK(tally.fn == 0);
}

TEST_CASE("circle marks are read as undirected or directed") {
    MixedGraph g(3);
    g.set_edge(0, 1, Mark::Circle, Mark::Circle);
    g.set_edge(1, 2, Mark::Circle, Mark::Arrow);
    CHECK(edge_status(g, 0, 1) == EdgeStatus::Undirected);
    CHECK(edge_status(g, 1, 2) == EdgeStatus::Forward);
    CHECK(edge_status(g, 2, 1) == EdgeStatus::Backward);
    CHECK(edge_status(g, 0, 2) == EdgeStatus::Absent);
    g.set_edge(0, 2, Mark::Arrow, Mark::Arrow);
    CHECK(edge_status(g, 0, 2) == EdgeStatus::Bidirected);
    g.set_edge(0, 2, Mark::Circle, Mark::Tail);
    CHECK(edge_status(g, 0, 2) == EdgeStatus::Undirected);
}

TEST_CASE("degenerate comparisons") {
    MixedGraph empty(4);
    CHECK(overall_f1(empty, empty) == 1.0);
    CHECK(shd(empty, empty) == 0);
    MixedGraph one(4);
    one.add_directed(0, 1);
    CHECK(overall_f1(one, empty) == 0.0);
    CHECK(shd(one, empty) == 1);
    MixedGraph rev(4);
    rev.add_directed(1, 0);
    auto tally = classify_pairs(rev, one, NodeSet{0, 1, 2, 3});
    CHECK(tally.io == 1);
    CHECK(tally.rows.size() == 1);
    CHECK(tally.rows[0].cls == PairClass::IO);
}
