#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cml/graph.hpp"

namespace cml {

/// n x p sample matrix; rows are samples, columns align with node indices.
struct Dataset {
    Eigen::MatrixXd values;
    std::vector<std::string> names;

    int n() const { return static_cast<int>(values.rows()); }
    int p() const { return static_cast<int>(values.cols()); }
};

Dataset read_csv(const std::filesystem::path& path);
Dataset parse_csv(const std::string& text);
/// Header row of names, one sample per row, shortest round-trip decimal form.
std::string to_csv(const Dataset& d);
void write_csv(const std::filesystem::path& path, const Dataset& d);
Dataset select_rows(const Dataset& d, std::span<const int> rows);
/// FNV-1a over the shape and raw bytes of the value matrix.
std::uint64_t dataset_hash(const Dataset& d);

struct Covariance {
    Eigen::MatrixXd matrix;
    int n = 0;
};

/// Maximum-likelihood covariance (divisor n) of column-centred data. Needs n >= 2.
Covariance covariance(const Dataset& d);

/// Covariance cache document keyed by the dataset hash.
std::string covariance_to_json(const Covariance& c, std::uint64_t key);
/// Returns false when the document belongs to a different dataset.
bool covariance_from_json(const std::string& text, std::uint64_t key, Covariance& out);

/// Reciprocal-condition threshold below which a principal submatrix is singular.
inline constexpr double kSingularRcond = 1e-12;

/// Partial correlation of i and j given s, from the inverse of the principal
/// submatrix over {i, j} + s. Throws SingularSubmatrix when that submatrix has
/// reciprocal condition number below kSingularRcond.
double partial_correlation(const Covariance& c, int i, int j, const NodeSet& s);

/// Two-sided standard normal tail probability P(|Z| >= |z|), via std::erfc.
double normal_two_sided_p(double z);

struct CiDecision {
    bool independent = false;
    double statistic = 0.0;
    double p_value = 0.0;
    int conditioning_size = 0;
};

/// statistic = sqrt(n - s_size - 3) * atanh(rho); independence iff p_value > alpha.
CiDecision fisher_z_test(double rho, int n, int s_size, double alpha);

/// Conditional-independence tester backed either by d-separation in a known
/// DAG or by Fisher-z tests on a covariance matrix. `test` is safe to call
/// concurrently; the counters are atomic.
///
/// A session shares the backend and memoizes decisions by (pair, set,
/// alpha), so a repeated query is neither recomputed nor counted again.
/// Its count is the number of distinct tests, which does not depend on the
/// order or thread in which queries arrive.
class CiTester {
public:
    static CiTester oracle(Dag dag);
    static CiTester fisher_z(Covariance cov);

    CiTester(CiTester&& other) noexcept;
    CiTester& operator=(CiTester&&) = delete;
    CiTester(const CiTester&) = delete;
    ~CiTester();

    CiDecision test(int i, int j, const NodeSet& s, double alpha) const;

    /// Fresh memoizing tester over the same backend with zeroed counters.
    CiTester session() const;
    bool is_session() const { return cache_ != nullptr; }
    /// Adds a finished session's counts to this tester's counters.
    void absorb(const CiTester& session) const;

    int size() const;
    bool is_oracle() const { return std::holds_alternative<Dag>(*backend_); }
    /// The ground-truth DAG for oracle testers, nullptr otherwise.
    const Dag* dag() const { return std::get_if<Dag>(backend_.get()); }
    const Covariance* cov() const { return std::get_if<Covariance>(backend_.get()); }

    long long count() const { return count_.load(std::memory_order_relaxed); }
    /// Tests whose conditioning submatrix was singular; each was reported as dependent.
    long long singular_count() const { return singular_.load(std::memory_order_relaxed); }
    void reset_counts();

private:
    struct Cache;
    using Backend = std::variant<Dag, Covariance>;

    explicit CiTester(std::shared_ptr<const Backend> backend);
    CiDecision evaluate(int i, int j, const NodeSet& s, double alpha, bool& singular) const;

    std::shared_ptr<const Backend> backend_;
    std::unique_ptr<Cache> cache_;
    mutable std::atomic<long long> count_{0};
    mutable std::atomic<long long> singular_{0};
};

inline CiDecision ci_test(const CiTester& t, int i, int j, const NodeSet& s, double alpha) {
    return t.test(i, j, s, alpha);
}

}  // namespace cml
