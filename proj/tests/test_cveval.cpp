#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cml/cveval.hpp"
#include "cml/metrics.hpp"
#include "cml/rng.hpp"
#include "cml/simgen.hpp"
#include "oracles.hpp"

using namespace cml;
using oracle::n;

namespace {

bool new_unshielded_collider(const MixedGraph& before, const MixedGraph& after, int t) {
    auto pa_after = directed_parents(after, t);
    auto pa_before = directed_parents(before, t);
    for (std::size_t a = 0; a < pa_after.size(); ++a)
        for (std::size_t b = a + 1; b < pa_after.size(); ++b) {
            int x = pa_after[a], y = pa_after[b];
            if (after.adjacent(x, y)) continue;
            if (!(nodeset::contains(pa_before, x) && nodeset::contains(pa_before, y))) return true;
        }
    return false;
}

}  // namespace

TEST_CASE("fold partitions") {
    auto singles = kfold_split(10, 10, 3);
    for (const auto& f : singles) CHECK(f.size() == 1);
    auto cells = kfold_split(1018, 10, 1);
    for (const auto& f : cells) CHECK((f.size() == 101 || f.size() == 102));
    Rng rng(99);
    for (int rep = 0; rep < 100; ++rep) {
        const int rows = 2 + static_cast<int>(rng.uniform_int(0, 300));
        const int k = 2 + static_cast<int>(rng.uniform_int(0, std::min(rows, 20) - 2));
        auto folds = kfold_split(rows, k, static_cast<std::uint64_t>(rep));
        std::vector<int> hits(static_cast<std::size_t>(rows), 0);
        std::size_t lo = folds[0].size(), hi = folds[0].size();
        for (const auto& f : folds) {
            lo = std::min(lo, f.size());
            hi = std::max(hi, f.size());
            for (int r : f) ++hits[static_cast<std::size_t>(r)];
        }
        for (int h : hits) REQUIRE(h == 1);
        REQUIRE(hi - lo <= 1);
    }
    CHECK(kfold_split(50, 5, 8) == kfold_split(50, 5, 8));
    CHECK_THROWS_AS(kfold_split(3, 4, 1), InvalidArgument);
}

TEST_CASE("maximal parent sets") {
    MixedGraph d = oracle::fig1d();
    CHECK(max_parent_set(d, n(8)) == NodeSet{n(7)});
    CHECK(max_parent_set(d, n(3)) == NodeSet{n(1), n(2)});

    MixedGraph tri(3);
    tri.add_undirected(0, 2);
    tri.add_undirected(1, 2);
    tri.add_undirected(0, 1);
    CHECK(max_parent_set(tri, 2) == NodeSet{0, 1});

    // Orienting 1 -> 0 would close the cycle 0 -> 2 -> 1 -> 0.
    MixedGraph cyc(3);
    cyc.add_directed(0, 2);
    cyc.add_directed(2, 1);
    cyc.add_undirected(0, 1);
    CHECK(max_parent_set(cyc, 0).empty());
}

TEST_CASE("maximal parent sets never add an unshielded collider") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        Dag g = random_dag(14, 2.5, seed);
        TargetSpec t({static_cast<int>(seed % 14)}, 14);
        CiTester tester = CiTester::oracle(g);
        for (const auto* alg : {"snl", "cml"}) {
            DiscoveryResult r = std::string(alg) == "snl" ? run_snl(tester, t, MbConfig{}, DiscoveryConfig{})
                                                          : run_cml(tester, t, MbConfig{}, DiscoveryConfig{});
            for (int v : r.nbs.all) {
                MixedGraph work = r.graph;
                NodeSet pa = max_parent_set(work, v);
                NodeSet fixed = directed_parents(work, v);
                CHECK(std::includes(pa.begin(), pa.end(), fixed.begin(), fixed.end()));
                orient_into(work, v, pa);
                CHECK_FALSE(new_unshielded_collider(r.graph, work, v));
            }
        }
    }
}

TEST_CASE("least squares fits") {
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 6;
    OlsFit m = ols_fit(y, Eigen::MatrixXd(4, 0));
    CHECK(m.intercept == doctest::Approx(3.0));
    CHECK(m.sigma2 == doctest::Approx(3.5));

    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 2, 3;
    Eigen::VectorXd exact = 2.0 * x.col(0).array() + 1.0;
    OlsFit e = ols_fit(exact, x);
    CHECK(e.coef(0) == doctest::Approx(2.0));
    CHECK(e.sigma2 == kVarianceFloor);

    Eigen::MatrixXd dup(4, 2);
    dup << 0, 0, 1, 2, 2, 4, 3, 6;
    CHECK_THROWS_AS(ols_fit(y, dup), RankDeficient);
}

TEST_CASE("least squares recovers SEM coefficients") {
    Dag g = oracle::fig1_dag();
    SemParams params = sample_params(g, SimConfig{});
    Dataset d = simulate_data(g, params, 20000, 12);
    const int t = n(3);
    NodeSet pa = g.parents(t);
    Eigen::MatrixXd x(d.n(), static_cast<Eigen::Index>(pa.size()));
    for (std::size_t k = 0; k < pa.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = d.values.col(pa[k]);
    OlsFit fit = ols_fit(d.values.col(t), x);
    Eigen::MatrixXd design(d.n(), x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    Eigen::MatrixXd cov = fit.sigma2 * (design.transpose() * design).inverse();
    for (std::size_t k = 0; k < pa.size(); ++k) {
        double se = std::sqrt(cov(static_cast<Eigen::Index>(k) + 1, static_cast<Eigen::Index>(k) + 1));
        CHECK(std::fabs(fit.coef(static_cast<Eigen::Index>(k)) - params.coef(pa[k], t)) < 2.0 * se + 1e-3);
    }
}

TEST_CASE("held-out log-likelihood") {
    Dataset zero{Eigen::MatrixXd::Zero(5, 1), {"y"}};
    TargetModel perfect{0, {}, OlsFit{0.0, Eigen::VectorXd(0), 1.0 / (2.0 * std::numbers::pi)}};
    CHECK(std::fabs(test_loglik(zero, {perfect})) < 1e-12);

    Rng rng(1);
    const double sigma = 0.7;
    Dataset iid{Eigen::MatrixXd(100000, 1), {"y"}};
    for (int r = 0; r < iid.n(); ++r) iid.values(r, 0) = sigma * rng.normal();
    TargetModel m{0, {}, ols_fit(iid.values.col(0), Eigen::MatrixXd(iid.n(), 0))};
    const double expected = -0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma) - 0.5;
    CHECK(std::fabs(test_loglik(iid, {m}) - expected) < 0.02);

    Dataset shuffled = iid;
    std::vector<int> order(static_cast<std::size_t>(iid.n()));
    for (int r = 0; r < iid.n(); ++r) order[static_cast<std::size_t>(r)] = r;
    rng.shuffle(order);
    shuffled = select_rows(iid, order);
    CHECK(test_loglik(shuffled, {m}) == doctest::Approx(test_loglik(iid, {m})).epsilon(1e-12));

    TargetModel wide = m, narrow = m;
    wide.fit.sigma2 *= 2.0;
    narrow.fit.sigma2 *= 0.5;
    CHECK(test_loglik(iid, {wide}) < test_loglik(iid, {m}));
    CHECK(test_loglik(iid, {narrow}) < test_loglik(iid, {m}));

    TargetModel tiny = m;
    tiny.fit.sigma2 = 1e-20;
    CHECK_THROWS_AS(test_loglik(iid, {tiny}), InvalidArgument);
}

TEST_CASE("cross-validation runs") {
    Dag g = oracle::fig1_dag();
    SemParams params = sample_params(g, SimConfig{});
    Dataset d = simulate_data(g, params, 2000, 21);
    std::vector<TargetSpec> targets{TargetSpec({n(3), n(8)}, 13)};

    CvConfig cfg;
    cfg.k = 2;
    cfg.algorithm = "snl";
    CvReport a = run_cv(d, targets, cfg);
    CHECK(a.folds.size() == 2);
    CHECK(a.folds[0].size() + a.folds[1].size() == 2000);
    CHECK(a.rows.size() == 4);
    CvReport b = run_cv(d, targets, cfg);
    CHECK(cv_report_csv(a, d.names) == cv_report_csv(b, d.names));
    CHECK(cv_report_json(a, d.names).dump() == cv_report_json(b, d.names).dump());

    CvConfig bad = cfg;
    bad.k = 1;
    CHECK_THROWS_AS(run_cv(d, targets, bad), InvalidArgument);
    bad.k = 2;
    bad.algorithm = "ges";
    CHECK_THROWS_AS(run_cv(d, targets, bad), InvalidArgument);
}

TEST_CASE("the max mode does not lose likelihood for SNL") {
    double min_total = 0.0, max_total = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Dag g = oracle::fig1_dag();
        SimConfig sim;
        sim.seed = seed;
        Dataset d = simulate_data(g, sample_params(g, sim), 5000, seed);
        CvConfig cfg;
        cfg.k = 5;
        cfg.seed = seed;
        cfg.algorithm = "snl";
        CvReport rep = run_cv(d, {TargetSpec({n(3), n(8)}, 13)}, cfg);
        for (const auto& row : rep.rows) (row.mode == ParentMode::Min ? min_total : max_total) += row.loglik;
    }
    CHECK(max_total >= min_total);
}

TEST_CASE("held-out rows do not influence the fits") {
    Dag g = oracle::fig1_dag();
    Dataset d = simulate_data(g, sample_params(g, SimConfig{}), 600, 4);
    CvConfig cfg;
    cfg.k = 3;
    cfg.algorithm = "cml";
    std::vector<TargetSpec> targets{TargetSpec({n(3)}, 13)};
    CvReport base = run_cv(d, targets, cfg);
    // Swap two rows inside fold 0: fold 0's fit is unchanged, and the other
    // folds train on the same multiset of rows.
    const auto& f0 = base.folds[0];
    Dataset swapped = d;
    swapped.values.row(f0[0]) = d.values.row(f0[1]);
    swapped.values.row(f0[1]) = d.values.row(f0[0]);
    CvReport other = run_cv(swapped, targets, cfg);
    REQUIRE(other.rows.size() == base.rows.size());
    for (std::size_t k = 0; k < base.rows.size(); ++k) {
        REQUIRE(base.rows[k].models.size() == other.rows[k].models.size());
        for (std::size_t m = 0; m < base.rows[k].models.size(); ++m) {
            const auto& x = base.rows[k].models[m];
            const auto& y = other.rows[k].models[m];
            CHECK(x.parents == y.parents);
            CHECK(x.fit.intercept == doctest::Approx(y.fit.intercept).epsilon(1e-9));
            CHECK(x.fit.sigma2 == doctest::Approx(y.fit.sigma2).epsilon(1e-9));
        }
    }
}
