#include "cml/simgen.hpp"

#include <set>

#include "cml/cpdag.hpp"
#include "cml/graph_json.hpp"
#include "cml/rng.hpp"
#include "cml/separation.hpp"

namespace cml {

namespace {
// Substream keys keep the draws of different operations independent under one seed.
constexpr std::uint64_t kParamsStream = 1;
constexpr std::uint64_t kDataStream = 2;
constexpr std::uint64_t kDagStream = 3;
constexpr std::uint64_t kTargetStream = 4;
}  // namespace

void SimConfig::validate() const {
    if (n < 1) throw InvalidArgument("n must be at least 1");
    if (!(coef_lo > 0.0 && coef_lo <= coef_hi)) throw InvalidArgument("coefficient range must satisfy 0 < lo <= hi");
    if (!(sd_lo > 0.0 && sd_lo <= sd_hi)) throw InvalidArgument("noise sd range must satisfy 0 < lo <= hi");
}

Dag load_network(const std::filesystem::path& path) { return read_dag_file(path); }

Dag random_dag(int p, double expected_degree, std::uint64_t seed) {
    if (p < 1) throw InvalidArgument("random_dag needs p >= 1");
    if (!(expected_degree >= 0.0)) throw InvalidArgument("expected degree must be non-negative");
    Rng rng = Rng::substream(seed, kDagStream);
    std::vector<int> order(static_cast<std::size_t>(p));
    for (int v = 0; v < p; ++v) order[static_cast<std::size_t>(v)] = v;
    rng.shuffle(order);
    const double prob = p > 1 ? std::min(1.0, expected_degree / (p - 1)) : 0.0;
    std::vector<std::pair<int, int>> edges;
    for (std::size_t a = 0; a < order.size(); ++a)
        for (std::size_t b = a + 1; b < order.size(); ++b)
            if (rng.bernoulli(prob)) edges.emplace_back(order[a], order[b]);
    return Dag(p, edges);
}

SemParams sample_params(const Dag& g, const SimConfig& cfg) {
    cfg.validate();
    Rng rng = Rng::substream(cfg.seed, kParamsStream);
    const int p = g.size();
    SemParams out{Eigen::MatrixXd::Zero(p, p), Eigen::VectorXd::Zero(p)};
    for (auto [from, to] : g.edge_list()) {
        double magnitude = rng.uniform(cfg.coef_lo, cfg.coef_hi);
        out.coef(from, to) = rng.bernoulli(0.5) ? magnitude : -magnitude;
    }
    for (int v = 0; v < p; ++v) out.sigma(v) = rng.uniform(cfg.sd_lo, cfg.sd_hi);
    return out;
}

namespace {

void check_params(const Dag& g, const SemParams& params) {
    const int p = g.size();
    if (params.coef.rows() != p || params.coef.cols() != p || params.sigma.size() != p)
        throw InvalidArgument("SEM parameters do not match the graph size");
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (params.coef(i, j) != 0.0 && !g.graph().is_directed(i, j))
                throw InvalidArgument("SEM coefficient on a pair that is not an edge");
    for (int v = 0; v < p; ++v)
        if (!(params.sigma(v) > 0.0)) throw InvalidArgument("noise standard deviations must be positive");
}

}  // namespace

Dataset simulate_data(const Dag& g, const SemParams& params, int n, std::uint64_t seed) {
    check_params(g, params);
    if (n < 1) throw InvalidArgument("n must be at least 1");
    Rng rng = Rng::substream(seed, kDataStream);
    const int p = g.size();
    Dataset d;
    d.names = g.graph().names();
    d.values.resize(n, p);
    const auto& order = g.topological_order();
    for (int r = 0; r < n; ++r) {
        for (int j : order) {
            double x = 0.0;
            for (int i : g.parents(j)) x += params.coef(i, j) * d.values(r, i);
            d.values(r, j) = x + params.sigma(j) * rng.normal();
        }
    }
    return d;
}

Covariance implied_covariance(const Dag& g, const SemParams& params) {
    check_params(g, params);
    const int p = g.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p, p) - params.coef;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw InvalidArgument("I - B is singular");
    Eigen::MatrixXd inv = lu.inverse();
    Eigen::VectorXd var = params.sigma.array().square();
    Covariance c;
    c.matrix = inv.transpose() * var.asDiagonal() * inv;
    c.matrix = (c.matrix + c.matrix.transpose()) * 0.5;
    c.n = 0;
    return c;
}

nlohmann::json params_to_json(const Dag& g, const SemParams& params) {
    nlohmann::json coef = nlohmann::json::array();
    for (auto [from, to] : g.edge_list()) coef.push_back({from, to, params.coef(from, to)});
    std::vector<double> sigma(params.sigma.data(), params.sigma.data() + params.sigma.size());
    return {{"p", g.size()}, {"coefficients", coef}, {"sigma", sigma}};
}

SemParams params_from_json(const nlohmann::json& doc, const Dag& g) {
    try {
        const int p = doc.at("p").get<int>();
        if (p != g.size()) throw ParseError("parameter file size does not match the network");
        SemParams out{Eigen::MatrixXd::Zero(p, p), Eigen::VectorXd::Zero(p)};
        for (const auto& c : doc.at("coefficients")) out.coef(c.at(0).get<int>(), c.at(1).get<int>()) = c.at(2).get<double>();
        auto sigma = doc.at("sigma").get<std::vector<double>>();
        if (static_cast<int>(sigma.size()) != p) throw ParseError("sigma length does not match the network");
        for (int v = 0; v < p; ++v) out.sigma(v) = sigma[static_cast<std::size_t>(v)];
        check_params(g, out);
        return out;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("SEM parameters: ") + ex.what());
    }
}

std::pair<int, int> truth_subgraph_size(const Dag& g, const TargetSpec& t) {
    NodeSet nb;
    for (const auto& s : true_neighborhoods(g, t)) nb = nodeset::unite(nb, s);
    MixedGraph sub = cpdag(g).induced(nb);
    return {static_cast<int>(nb.size()), static_cast<int>(sub.num_edges())};
}

bool admissible_targets(const Dag& g, const TargetSpec& t, const TargetFilter& filter) {
    auto [nodes, edges] = truth_subgraph_size(g, t);
    return nodes >= filter.min_nodes && nodes <= filter.max_nodes && edges >= filter.min_edges && edges <= filter.max_edges;
}

std::vector<TargetSpec> select_targets(const Dag& g, const std::vector<int>& sizes, int count, std::uint64_t seed,
                                       const TargetFilter& filter, int max_attempts) {
    if (sizes.empty()) throw InvalidArgument("target sizes must be non-empty");
    for (int s : sizes)
        if (s < 1 || s > g.size()) throw InvalidArgument("target size out of range");
    Rng rng = Rng::substream(seed, kTargetStream);
    const MixedGraph truth = cpdag(g);
    std::vector<TargetSpec> out;
    std::set<NodeSet> seen;
    std::vector<int> nodes(static_cast<std::size_t>(g.size()));
    for (int v = 0; v < g.size(); ++v) nodes[static_cast<std::size_t>(v)] = v;
    for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count; ++attempt) {
        int size = sizes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(sizes.size()) - 1))];
        std::vector<int> pick = nodes;
        rng.shuffle(pick);
        pick.resize(static_cast<std::size_t>(size));
        TargetSpec t(pick, g.size());
        if (seen.count(t.nodes())) continue;
        NodeSet nb;
        for (int v : t) nb = nodeset::unite(nb, nodeset::with(markov_blanket(g, v), v));
        const int n_nodes = static_cast<int>(nb.size());
        const int n_edges = static_cast<int>(truth.induced(nb).num_edges());
        if (n_nodes < filter.min_nodes || n_nodes > filter.max_nodes || n_edges < filter.min_edges || n_edges > filter.max_edges)
            continue;
        seen.insert(t.nodes());
        out.push_back(std::move(t));
    }
    if (static_cast<int>(out.size()) < count)
        throw Error("only " + std::to_string(out.size()) + " admissible target sets found after " +
                    std::to_string(max_attempts) + " draws");
    return out;
}

}  // namespace cml
