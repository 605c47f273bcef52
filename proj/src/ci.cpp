#include "cml/ci.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <array>
#include <limits>
#include <mutex>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "cml/graph_json.hpp"
#include "cml/separation.hpp"

namespace cml {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

Dataset parse_csv(const std::string& text) {
    std::vector<std::string_view> lines;
    std::string_view rest(text);
    while (!rest.empty()) {
        auto pos = rest.find('\n');
        auto line = rest.substr(0, pos);
        if (!trim(line).empty()) lines.push_back(line);
        if (pos == std::string_view::npos) break;
        rest.remove_prefix(pos + 1);
    }
    if (lines.empty()) throw ParseError("CSV: missing header row");
    Dataset d;
    for (auto name : split_commas(lines[0])) {
        std::string n(name);
        if (n.size() >= 2 && n.front() == '"' && n.back() == '"') n = n.substr(1, n.size() - 2);
        d.names.push_back(n);
    }
    const auto p = d.names.size();
    d.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(p));
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto cells = split_commas(lines[r]);
        if (cells.size() != p)
            throw ParseError(fmt::format("CSV line {}: expected {} fields, found {}", r + 1, p, cells.size()));
        for (std::size_t c = 0; c < p; ++c) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), v);
            if (ec != std::errc() || ptr != cells[c].data() + cells[c].size() || !std::isfinite(v))
                throw ParseError(fmt::format("CSV line {}: field {} is not a finite number", r + 1, c + 1));
            d.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return d;
}

Dataset read_csv(const std::filesystem::path& path) { return parse_csv(read_text_file(path)); }

std::string to_csv(const Dataset& d) {
    std::string out;
    for (int c = 0; c < d.p(); ++c) {
        if (c) out += ',';
        out += d.names[static_cast<std::size_t>(c)];
    }
    out += '\n';
    for (int r = 0; r < d.n(); ++r) {
        for (int c = 0; c < d.p(); ++c) {
            if (c) out += ',';
            out += fmt::format("{}", d.values(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& d) { write_text_file(path, to_csv(d)); }

Dataset select_rows(const Dataset& d, std::span<const int> rows) {
    Dataset out;
    out.names = d.names;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), d.values.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] < 0 || rows[r] >= d.n()) throw InvalidArgument("row index out of range");
        out.values.row(static_cast<Eigen::Index>(r)) = d.values.row(rows[r]);
    }
    return out;
}

std::uint64_t dataset_hash(const Dataset& d) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < len; ++k) {
            h ^= bytes[k];
            h *= 1099511628211ull;
        }
    };
    std::int64_t shape[2] = {d.n(), d.p()};
    mix(shape, sizeof(shape));
    mix(d.values.data(), static_cast<std::size_t>(d.values.size()) * sizeof(double));
    return h;
}

Covariance covariance(const Dataset& d) {
    if (d.n() < 2) throw InvalidArgument("covariance needs at least two samples");
    Eigen::MatrixXd centred = d.values.rowwise() - d.values.colwise().mean();
    Covariance c;
    c.matrix = (centred.adjoint() * centred) / static_cast<double>(d.n());
    c.matrix = (c.matrix + c.matrix.transpose()) * 0.5;
    c.n = d.n();
    return c;
}

std::string covariance_to_json(const Covariance& c, std::uint64_t key) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < c.matrix.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(c.matrix.cols()));
        for (Eigen::Index k = 0; k < c.matrix.cols(); ++k) row[static_cast<std::size_t>(k)] = c.matrix(r, k);
        rows.push_back(row);
    }
    nlohmann::json doc = {{"dataset_hash", fmt::format("{:016x}", key)}, {"n", c.n}, {"matrix", rows}};
    return doc.dump() + "\n";
}

bool covariance_from_json(const std::string& text, std::uint64_t key, Covariance& out) {
    try {
        auto doc = nlohmann::json::parse(text);
        if (doc.at("dataset_hash").get<std::string>() != fmt::format("{:016x}", key)) return false;
        const auto& rows = doc.at("matrix");
        const auto p = static_cast<Eigen::Index>(rows.size());
        out.matrix.resize(p, p);
        for (Eigen::Index r = 0; r < p; ++r) {
            const auto& row = rows[static_cast<std::size_t>(r)];
            if (static_cast<Eigen::Index>(row.size()) != p) throw ParseError("covariance cache is not square");
            for (Eigen::Index k = 0; k < p; ++k) out.matrix(r, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
        out.n = doc.at("n").get<int>();
        return true;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("covariance cache: ") + ex.what());
    }
}

double partial_correlation(const Covariance& c, int i, int j, const NodeSet& s) {
    const int p = static_cast<int>(c.matrix.rows());
    if (i < 0 || j < 0 || i >= p || j >= p || i == j) throw InvalidArgument("partial_correlation: invalid pair");
    std::vector<int> vars{i, j};
    for (int v : s) {
        if (v < 0 || v >= p || v == i || v == j) throw InvalidArgument("partial_correlation: invalid conditioning set");
        vars.push_back(v);
    }
    const auto k = static_cast<Eigen::Index>(vars.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = c.matrix(vars[static_cast<std::size_t>(a)], vars[static_cast<std::size_t>(b)]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
    if (eig.info() != Eigen::Success) throw SingularSubmatrix("eigen-decomposition failed");
    const auto& lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    const double lmin = lambda.minCoeff();
    if (!(lmax > 0.0) || lmin / lmax < kSingularRcond)
        throw SingularSubmatrix(fmt::format("conditioning submatrix has reciprocal condition {:.3g}", lmax > 0 ? lmin / lmax : 0.0));

    // Only the top-left 2x2 block of the precision matrix is needed.
    const auto& vecs = eig.eigenvectors();
    Eigen::Matrix2d prec = Eigen::Matrix2d::Zero();
    for (Eigen::Index m = 0; m < k; ++m) {
        const double w = 1.0 / lambda(m);
        prec(0, 0) += w * vecs(0, m) * vecs(0, m);
        prec(0, 1) += w * vecs(0, m) * vecs(1, m);
        prec(1, 1) += w * vecs(1, m) * vecs(1, m);
    }
    return -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
}

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

CiDecision fisher_z_test(double rho, int n, int s_size, double alpha) {
    const int dof = n - s_size - 3;
    if (dof <= 0) throw InsufficientSample(fmt::format("n - |S| - 3 = {} is not positive", dof));
    if (!(std::fabs(rho) < 1.0)) throw DegenerateCorrelation(fmt::format("|rho| = {} is not below 1", std::fabs(rho)));
    CiDecision d;
    d.statistic = std::sqrt(static_cast<double>(dof)) * std::atanh(rho);
    d.p_value = normal_two_sided_p(d.statistic);
    d.independent = d.p_value > alpha;
    d.conditioning_size = s_size;
    return d;
}

struct CiTester::Cache {
    static constexpr std::size_t kShards = 32;

    struct Key {
        std::vector<int> nodes;
        double alpha;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint64_t h = std::hash<double>{}(k.alpha);
            for (int v : k.nodes) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
            return static_cast<std::size_t>(h);
        }
    };
    struct Shard {
        std::mutex mutex;
        std::unordered_map<Key, CiDecision, KeyHash> map;
    };
    std::array<Shard, kShards> shards;
};

CiTester::CiTester(std::shared_ptr<const Backend> backend) : backend_(std::move(backend)) {}

CiTester::~CiTester() = default;

CiTester CiTester::oracle(Dag dag) { return CiTester(std::make_shared<const Backend>(std::move(dag))); }

CiTester CiTester::fisher_z(Covariance cov) {
    if (cov.matrix.rows() != cov.matrix.cols()) throw InvalidArgument("covariance matrix must be square");
    return CiTester(std::make_shared<const Backend>(std::move(cov)));
}

CiTester::CiTester(CiTester&& other) noexcept
    : backend_(std::move(other.backend_)),
      cache_(std::move(other.cache_)),
      count_(other.count_.load()),
      singular_(other.singular_.load()) {}

CiTester CiTester::session() const {
    CiTester out(backend_);
    out.cache_ = std::make_unique<Cache>();
    return out;
}

void CiTester::absorb(const CiTester& session) const {
    count_.fetch_add(session.count(), std::memory_order_relaxed);
    singular_.fetch_add(session.singular_count(), std::memory_order_relaxed);
}

int CiTester::size() const {
    if (const auto* g = dag()) return g->size();
    return static_cast<int>(std::get<Covariance>(*backend_).matrix.rows());
}

void CiTester::reset_counts() {
    count_.store(0);
    singular_.store(0);
}

CiDecision CiTester::evaluate(int i, int j, const NodeSet& s, double alpha, bool& singular) const {
    singular = false;
    const int s_size = static_cast<int>(s.size());
    if (const auto* g = dag()) {
        detail::check_pair(g->graph(), i, j, s);
        bool sep = !detail::m_connected(g->graph(), i, j, nodeset::mask(s, g->size()));
        CiDecision d;
        d.independent = sep;
        d.p_value = sep ? 1.0 : 0.0;
        d.statistic = sep ? 0.0 : std::numeric_limits<double>::infinity();
        d.conditioning_size = s_size;
        return d;
    }
    const auto& c = std::get<Covariance>(*backend_);
    double rho = 0.0;
    try {
        rho = partial_correlation(c, i, j, s);
    } catch (const SingularSubmatrix&) {
        singular = true;
        CiDecision d;
        d.independent = false;
        d.p_value = 0.0;
        d.statistic = std::numeric_limits<double>::infinity();
        d.conditioning_size = s_size;
        return d;
    }
    return fisher_z_test(rho, c.n, s_size, alpha);
}

CiDecision CiTester::test(int i, int j, const NodeSet& s, double alpha) const {
    bool singular = false;
    if (!cache_) {
        auto d = evaluate(i, j, s, alpha, singular);
        count_.fetch_add(1, std::memory_order_relaxed);
        if (singular) singular_.fetch_add(1, std::memory_order_relaxed);
        return d;
    }
    Cache::Key key{{std::min(i, j), std::max(i, j)}, alpha};
    key.nodes.insert(key.nodes.end(), s.begin(), s.end());
    auto& shard = cache_->shards[Cache::KeyHash{}(key) % Cache::kShards];
    {
        std::lock_guard lock(shard.mutex);
        auto it = shard.map.find(key);
        if (it != shard.map.end()) return it->second;
    }
    auto d = evaluate(i, j, s, alpha, singular);
    std::lock_guard lock(shard.mutex);
    if (shard.map.emplace(std::move(key), d).second) {
        count_.fetch_add(1, std::memory_order_relaxed);
        if (singular) singular_.fetch_add(1, std::memory_order_relaxed);
    }
    return d;
}

}  // namespace cml
