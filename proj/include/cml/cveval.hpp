#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cml/ci.hpp"
#include "cml/discovery.hpp"
#include "cml/graph.hpp"

namespace cml {

/// Random permutation of the rows; position r goes to fold r % k. Each fold
/// is returned sorted. Sizes differ by at most one.
std::vector<std::vector<int>> kfold_split(int n, int k, std::uint64_t seed);

/// Directed parents of t plus the largest set of t's undirected neighbors
/// (bidirected edges count as undirected) that can be oriented into t without
/// a new unshielded collider at t or a directed cycle. Candidate sets are
/// tried largest first, lexicographically within a size.
NodeSet max_parent_set(const MixedGraph& g, int t);
/// Orients u -> t for every u in `parents` that is not already a directed parent.
void orient_into(MixedGraph& g, int t, const NodeSet& parents);
/// Nodes whose edge to t scores as directed into t.
NodeSet directed_parents(const MixedGraph& g, int t);

/// Floor applied to fitted residual variances.
inline constexpr double kVarianceFloor = 1e-12;

struct OlsFit {
    double intercept = 0.0;
    Eigen::VectorXd coef;
    /// RSS / n, floored at kVarianceFloor.
    double sigma2 = 0.0;
};

/// Least squares of y on [1, x]. Throws RankDeficient when the design has
/// fewer independent columns than its width.
OlsFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

struct TargetModel {
    int target = 0;
    NodeSet parents;
    OlsFit fit;
};

/// -(1 / (n |T|)) * sum over models of [ n/2 log(2 pi s2) + RSS / (2 s2) ],
/// evaluated on the rows of `test`. Throws InvalidArgument when a model's
/// variance is below kVarianceFloor.
double test_loglik(const Dataset& test, const std::vector<TargetModel>& models);

enum class ParentMode { Min, Max };

struct CvConfig {
    int k = 10;
    std::uint64_t seed = 1;
    std::string algorithm = "cml";
    std::vector<ParentMode> modes{ParentMode::Min, ParentMode::Max};
    MbConfig mb;
    DiscoveryConfig discovery;

    void validate(int n) const;
};

struct CvRow {
    int fold = 0;
    NodeSet targets;
    std::string algorithm;
    ParentMode mode = ParentMode::Min;
    double loglik = 0.0;
    std::vector<TargetModel> models;
};

struct CvReport {
    std::vector<std::vector<int>> folds;
    std::vector<CvRow> rows;
};

/// Per fold: covariance of the training rows, discovery for every target set,
/// parent sets per mode, OLS fits on the training rows and the held-out
/// log-likelihood.
CvReport run_cv(const Dataset& data, const std::vector<TargetSpec>& targets, const CvConfig& cfg);

std::string cv_report_csv(const CvReport& report, const std::vector<std::string>& names);
nlohmann::json cv_report_json(const CvReport& report, const std::vector<std::string>& names);

}  // namespace cml
