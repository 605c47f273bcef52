#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cml/ci.hpp"
#include "cml/graph.hpp"

namespace cml {

/// Linear SEM X_j = sum_i beta_ij X_i + eps_j with eps_j ~ N(0, sigma_j^2).
struct SemParams {
    /// coef(i, j) = beta_ij for an edge i -> j, zero elsewhere.
    Eigen::MatrixXd coef;
    Eigen::VectorXd sigma;
};

struct SimConfig {
    int n = 1000;
    double coef_lo = 0.4;
    double coef_hi = 0.75;
    double sd_lo = 0.1;
    double sd_hi = 0.5;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Network file in the graph JSON format; every edge must be ["t", "a"].
Dag load_network(const std::filesystem::path& path);

/// Random order of the nodes, then each forward pair joined independently
/// with probability expected_degree / (p - 1), capped at 1.
Dag random_dag(int p, double expected_degree, std::uint64_t seed);

/// |beta| ~ Unif(coef_lo, coef_hi) with a fair random sign, drawn over the
/// edges in (from, to) order; sigma_j ~ Unif(sd_lo, sd_hi) in node order.
SemParams sample_params(const Dag& g, const SimConfig& cfg);

/// n samples; each row is generated in topological order.
Dataset simulate_data(const Dag& g, const SemParams& params, int n, std::uint64_t seed);

/// (I - B)^-T diag(sigma^2) (I - B)^-1, with n left at 0.
Covariance implied_covariance(const Dag& g, const SemParams& params);

nlohmann::json params_to_json(const Dag& g, const SemParams& params);
SemParams params_from_json(const nlohmann::json& doc, const Dag& g);

struct TargetFilter {
    int min_nodes = 8;
    int max_nodes = 20;
    int min_edges = 3;
    int max_edges = 20;
};

/// Node and edge counts of cpdag(g) restricted to the true NB_T.
std::pair<int, int> truth_subgraph_size(const Dag& g, const TargetSpec& t);
bool admissible_targets(const Dag& g, const TargetSpec& t, const TargetFilter& filter);

/// `count` distinct admissible target sets whose sizes are drawn from `sizes`.
/// Throws Error when fewer are found within `max_attempts` draws.
std::vector<TargetSpec> select_targets(const Dag& g, const std::vector<int>& sizes, int count, std::uint64_t seed,
                                       const TargetFilter& filter = {}, int max_attempts = 20000);

}  // namespace cml
