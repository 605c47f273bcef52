#include <doctest.h>

#include <cmath>

#include "cml/rng.hpp"
#include "cml/simgen.hpp"
#include "oracles.hpp"

using namespace cml;

namespace {

// Covariance of the SEM by the recursion over a topological order.
Eigen::MatrixXd recursive_covariance(const Dag& g, const SemParams& params) {
    const int p = g.size();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
    std::vector<int> done;
    for (int j : g.topological_order()) {
        for (int k : done) {
            double v = 0.0;
            for (int i : g.parents(j)) v += params.coef(i, j) * s(i, k);
            s(j, k) = s(k, j) = v;
        }
        double v = params.sigma(j) * params.sigma(j);
        for (int i : g.parents(j))
            for (int l : g.parents(j)) v += params.coef(i, j) * params.coef(l, j) * s(i, l);
        s(j, j) = v;
        done.push_back(j);
    }
    return s;
}

}  // namespace

TEST_CASE("random streams are reproducible") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int k = 0; k < 100; ++k) {
        auto x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);
    CHECK(Rng::substream(1, 2).next() == Rng::substream(1, 2).next());
    CHECK(Rng::substream(1, 2).next() != Rng::substream(1, 3).next());
}

TEST_CASE("distribution helpers") {
    Rng r(7);
    double sum = 0.0, sq = 0.0;
    const int count = 200000;
    for (int k = 0; k < count; ++k) {
        double z = r.normal();
        sum += z;
        sq += z * z;
        double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        auto i = r.uniform_int(-2, 3);
        REQUIRE(i >= -2);
        REQUIRE(i <= 3);
    }
    CHECK(std::fabs(sum / count) < 0.01);
    CHECK(std::fabs(sq / count - 1.0) < 0.02);
    std::vector<int> v{0, 1, 2, 3, 4, 5};
    r.shuffle(v);
    std::sort(v.begin(), v.end());
    CHECK(v == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("random DAGs are acyclic with the requested density") {
    double edges = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Dag g = random_dag(100, 3.0, seed);
        CHECK(g.topological_order().size() == 100);
        edges += static_cast<double>(g.edge_list().size());
    }
    // Expected degree 3 means 150 edges per graph on average.
    CHECK(std::fabs(edges / 50.0 - 150.0) < 6.0);
    CHECK(random_dag(30, 2.0, 9).edge_list() == random_dag(30, 2.0, 9).edge_list());
    CHECK_THROWS_AS(random_dag(10, -1.0, 1), InvalidArgument);
}

TEST_CASE("SEM parameters respect the configured ranges") {
    Dag g = oracle::fig1_dag();
    SimConfig cfg;
    SemParams params = sample_params(g, cfg);
    int negative = 0;
    for (int i = 0; i < 13; ++i)
        for (int j = 0; j < 13; ++j) {
            const double b = params.coef(i, j);
            if (g.graph().is_directed(i, j)) {
                CHECK(std::fabs(b) >= 0.4);
                CHECK(std::fabs(b) <= 0.75);
                negative += b < 0 ? 1 : 0;
            } else {
                CHECK(b == 0.0);
            }
        }
    CHECK(negative > 0);
    CHECK(negative < 14);
    for (int j = 0; j < 13; ++j) {
        CHECK(params.sigma(j) >= 0.1);
        CHECK(params.sigma(j) <= 0.5);
    }
    SimConfig bad;
    bad.coef_lo = 0.9;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("implied covariance matches the SEM recursion") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Dag g = random_dag(15, 2.5, seed);
        SimConfig cfg;
        cfg.seed = seed;
        SemParams params = sample_params(g, cfg);
        Covariance c = implied_covariance(g, params);
        CHECK((c.matrix - recursive_covariance(g, params)).norm() < 1e-12);
    }
}

TEST_CASE("simulated data is reproducible and centred on the SEM") {
    Dag g = oracle::fig1_dag();
    SimConfig cfg;
    SemParams params = sample_params(g, cfg);
    Dataset a = simulate_data(g, params, 200, 5);
    Dataset b = simulate_data(g, params, 200, 5);
    CHECK(a.values == b.values);
    CHECK(a.names == g.graph().names());
    Dataset big = simulate_data(g, params, 50000, 6);
    CHECK((covariance(big).matrix - implied_covariance(g, params).matrix).norm() < 0.02);
}

TEST_CASE("parameter JSON round trip") {
    Dag g = oracle::fig1_dag();
    SemParams params = sample_params(g, SimConfig{});
    SemParams back = params_from_json(params_to_json(g, params), g);
    CHECK(back.coef == params.coef);
    CHECK(back.sigma == params.sigma);
}

TEST_CASE("target selection honours the filter") {
    Dag g = random_dag(120, 2.0, 4);
    TargetFilter filter;
    auto sets = select_targets(g, {2, 3}, 8, 11, filter);
    CHECK(sets.size() == 8);
    std::set<NodeSet> seen;
    for (const auto& t : sets) {
        CHECK(admissible_targets(g, t, filter));
        auto [nodes, edges] = truth_subgraph_size(g, t);
        CHECK(nodes >= 8);
        CHECK(nodes <= 20);
        CHECK(edges >= 3);
        CHECK(edges <= 20);
        CHECK((t.size() == 2 || t.size() == 3));
        CHECK(seen.insert(t.nodes()).second);
    }
    TargetFilter impossible;
    impossible.min_nodes = 500;
    CHECK_THROWS_AS(select_targets(g, {2}, 1, 1, impossible, 200), Error);
}
