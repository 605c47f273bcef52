#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cml/metrics.hpp"
#include "cml/simgen.hpp"

namespace cml {

struct RandomDagSpec {
    int p = 50;
    double expected_degree = 2.0;
    /// Number of random DAGs drawn, one per replicate.
    int count = 1;
};

struct TargetSelection {
    std::vector<int> sizes{2, 3, 4};
    int count = 10;
    TargetFilter filter;
};

struct ExperimentConfig {
    /// Exactly one of `network` and `random_dag` is set.
    std::optional<std::filesystem::path> network;
    std::optional<RandomDagSpec> random_dag;
    /// Oracle runs skip simulation and use d-separation in the true DAG.
    bool oracle = false;
    SimConfig sim;
    std::vector<int> sample_sizes{1000};
    /// Datasets drawn per network, each with fresh coefficients.
    int datasets = 1;
    /// Explicit target sets (node names); when empty, `selection` is used.
    std::vector<std::vector<std::string>> target_sets;
    TargetSelection selection;
    std::vector<std::string> algorithms;
    std::vector<double> alpha_mb{0.01};
    std::vector<double> alpha_skel{0.01};
    std::vector<int> lmax{3};
    std::uint64_t seed = 1;
    int threads = 1;
    std::filesystem::path output = "results";

    void validate() const;
    /// (alpha_mb, alpha_skel) pairs in grid order.
    std::vector<std::pair<double, double>> alpha_pairs() const;
};

/// Parses the YAML configuration. Unknown keys and invalid values raise
/// ParseError naming the offending line. Relative network paths resolve
/// against `base_dir`.
ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig parse_config(const std::filesystem::path& path);

struct MetricsRow {
    std::string network;
    int replicate = 0;
    std::uint64_t dag_seed = 0;
    std::uint64_t data_seed = 0;
    /// 0 for oracle runs.
    int n = 0;
    std::vector<std::string> targets;
    std::string algorithm;
    double alpha_mb = 0.0;
    double alpha_skel = 0.0;
    int lmax = 0;
    /// "ok" or the error message of a failed cell.
    std::string status = "ok";
    MetricsReport metrics;
};

struct ExperimentResult {
    std::vector<MetricsRow> rows;
    /// (seed label, value) pairs in generation order.
    std::vector<std::pair<std::string, std::uint64_t>> seeds;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string metrics_csv(const std::vector<MetricsRow>& rows);
nlohmann::json metrics_json(const std::vector<MetricsRow>& rows);
std::string timings_csv(const std::vector<MetricsRow>& rows);
/// Median bne_count, F1 and CI-test count per (network, |T|, algorithm).
std::string summary_csv(const std::vector<MetricsRow>& rows);
nlohmann::json manifest_json(const ExperimentConfig& cfg, const ExperimentResult& result);

/// Writes metrics.csv, metrics.json, summary.csv, manifest.json and
/// timings.csv into cfg.output. Everything except timings.csv is a pure
/// function of the configuration.
void write_reports(const ExperimentConfig& cfg, const ExperimentResult& result);

/// Derives an independent 64-bit seed from (seed, key).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key);

}  // namespace cml
