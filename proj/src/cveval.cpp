#include "cml/cveval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "cml/metrics.hpp"
#include "cml/rng.hpp"
#include "cml/subsets.hpp"

namespace cml {

std::vector<std::vector<int>> kfold_split(int n, int k, std::uint64_t seed) {
    if (k < 1 || n < 1) throw InvalidArgument("kfold_split needs n >= 1 and k >= 1");
    if (k > n) throw InvalidArgument("more folds than rows");
    Rng rng = Rng::substream(seed, 5);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) perm[static_cast<std::size_t>(r)] = r;
    rng.shuffle(perm);
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
    for (int r = 0; r < n; ++r) folds[static_cast<std::size_t>(r % k)].push_back(perm[static_cast<std::size_t>(r)]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

NodeSet directed_parents(const MixedGraph& g, int t) {
    NodeSet out;
    for (int u : g.neighbors(t))
        if (edge_status(g, u, t) == EdgeStatus::Forward) out.push_back(u);
    return out;
}

namespace {

bool directed_path(const MixedGraph& g, int from, int to) {
    std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : g.neighbors(v)) {
            if (seen[static_cast<std::size_t>(w)] || edge_status(g, v, w) != EdgeStatus::Forward) continue;
            if (w == to) return true;
            seen[static_cast<std::size_t>(w)] = 1;
            stack.push_back(w);
        }
    }
    return false;
}

}  // namespace

void orient_into(MixedGraph& g, int t, const NodeSet& parents) {
    for (int u : parents)
        if (edge_status(g, u, t) != EdgeStatus::Forward) g.add_directed(u, t);
}

NodeSet max_parent_set(const MixedGraph& g, int t) {
    g.check_node(t);
    const NodeSet fixed = directed_parents(g, t);
    NodeSet loose;
    for (int u : g.neighbors(t)) {
        auto s = edge_status(g, u, t);
        if (s == EdgeStatus::Undirected || s == EdgeStatus::Bidirected) loose.push_back(u);
    }
    for (int size = static_cast<int>(loose.size()); size >= 0; --size) {
        NodeSet chosen;
        bool found = for_each_subset(loose, size, [&](const NodeSet& add) {
            for (std::size_t a = 0; a < add.size(); ++a) {
                for (int f : fixed)
                    if (!g.adjacent(add[a], f)) return false;
                for (std::size_t b = a + 1; b < add.size(); ++b)
                    if (!g.adjacent(add[a], add[b])) return false;
            }
            MixedGraph trial = g;
            orient_into(trial, t, add);
            for (int u : add)
                if (directed_path(trial, t, u)) return false;
            chosen = add;
            return true;
        });
        if (found) return nodeset::unite(fixed, chosen);
    }
    return fixed;
}

OlsFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const auto n = y.size();
    if (x.rows() != n) throw InvalidArgument("ols_fit: row counts differ");
    if (n < 1) throw InvalidArgument("ols_fit: no rows");
    Eigen::MatrixXd design(n, x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) throw RankDeficient(fmt::format("design of width {} has rank {}", design.cols(), qr.rank()));
    Eigen::VectorXd b = qr.solve(y);
    Eigen::VectorXd resid = y - design * b;
    OlsFit out;
    out.intercept = b(0);
    out.coef = b.tail(x.cols());
    out.sigma2 = std::max(resid.squaredNorm() / static_cast<double>(n), kVarianceFloor);
    return out;
}

namespace {

Eigen::MatrixXd columns(const Dataset& d, const NodeSet& cols) {
    Eigen::MatrixXd out(d.n(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = d.values.col(cols[c]);
    return out;
}

}  // namespace

double test_loglik(const Dataset& test, const std::vector<TargetModel>& models) {
    if (models.empty()) throw InvalidArgument("test_loglik needs at least one model");
    const double n = test.n();
    double total = 0.0;
    for (const auto& m : models) {
        if (!(m.fit.sigma2 >= kVarianceFloor)) throw InvalidArgument("model variance below the floor");
        if (m.fit.coef.size() != static_cast<Eigen::Index>(m.parents.size()))
            throw InvalidArgument("model coefficients do not match its parents");
        Eigen::VectorXd resid = test.values.col(m.target).array() - m.fit.intercept;
        if (!m.parents.empty()) resid -= columns(test, m.parents) * m.fit.coef;
        total += n / 2.0 * std::log(2.0 * std::numbers::pi * m.fit.sigma2) + resid.squaredNorm() / (2.0 * m.fit.sigma2);
    }
    return -total / (n * static_cast<double>(models.size()));
}

void CvConfig::validate(int n) const {
    if (k < 2 || k > n) throw InvalidArgument("fold count must satisfy 2 <= k <= n");
    if (algorithm != "cml" && algorithm != "snl" && algorithm != "pc") throw InvalidArgument("unknown algorithm " + algorithm);
    if (modes.empty()) throw InvalidArgument("at least one parent mode is required");
    mb.validate();
    discovery.validate();
}

CvReport run_cv(const Dataset& data, const std::vector<TargetSpec>& targets, const CvConfig& cfg) {
    cfg.validate(data.n());
    if (targets.empty()) throw InvalidArgument("run_cv needs at least one target set");
    CvReport report;
    report.folds = kfold_split(data.n(), cfg.k, cfg.seed);
    for (int f = 0; f < cfg.k; ++f) {
        const auto& held = report.folds[static_cast<std::size_t>(f)];
        std::vector<int> train_rows;
        std::vector<char> in_test(static_cast<std::size_t>(data.n()), 0);
        for (int r : held) in_test[static_cast<std::size_t>(r)] = 1;
        for (int r = 0; r < data.n(); ++r)
            if (!in_test[static_cast<std::size_t>(r)]) train_rows.push_back(r);
        const Dataset train = select_rows(data, train_rows);
        const Dataset test = select_rows(data, held);
        CiTester tester = CiTester::fisher_z(covariance(train));

        std::optional<DiscoveryResult> pc;
        if (cfg.algorithm == "pc") pc = run_pc(tester, cfg.discovery);
        for (const auto& t : targets) {
            DiscoveryResult r = pc ? *pc
                                : cfg.algorithm == "cml" ? run_cml(tester, t, cfg.mb, cfg.discovery)
                                                         : run_snl(tester, t, cfg.mb, cfg.discovery);
            for (ParentMode mode : cfg.modes) {
                CvRow row;
                row.fold = f;
                row.targets = t.nodes();
                row.algorithm = cfg.algorithm;
                row.mode = mode;
                MixedGraph work = r.graph;
                for (int target : t) {
                    TargetModel m;
                    m.target = target;
                    if (mode == ParentMode::Min) {
                        m.parents = directed_parents(work, target);
                    } else {
                        m.parents = max_parent_set(work, target);
                        orient_into(work, target, m.parents);
                    }
                    m.fit = ols_fit(train.values.col(target), columns(train, m.parents));
                    row.models.push_back(std::move(m));
                }
                row.loglik = test_loglik(test, row.models);
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

namespace {

std::string join_names(const NodeSet& s, const std::vector<std::string>& names, const char* sep) {
    std::string out;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out += sep;
        out += names[static_cast<std::size_t>(s[k])];
    }
    return out;
}

const char* mode_name(ParentMode m) { return m == ParentMode::Min ? "min" : "max"; }

}  // namespace

std::string cv_report_csv(const CvReport& report, const std::vector<std::string>& names) {
    std::string out = "fold,targets,algorithm,mode,loglik,parents\n";
    for (const auto& row : report.rows) {
        std::string parents;
        for (std::size_t k = 0; k < row.models.size(); ++k) {
            if (k) parents += ';';
            parents += names[static_cast<std::size_t>(row.models[k].target)] + ":" + join_names(row.models[k].parents, names, " ");
        }
        out += fmt::format("{},{},{},{},{},{}\n", row.fold, join_names(row.targets, names, " "), row.algorithm,
                           mode_name(row.mode), row.loglik, parents);
    }
    return out;
}

nlohmann::json cv_report_json(const CvReport& report, const std::vector<std::string>& names) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json models = nlohmann::json::array();
        for (const auto& m : row.models) {
            std::vector<std::string> pa;
            for (int v : m.parents) pa.push_back(names[static_cast<std::size_t>(v)]);
            std::vector<double> coef(m.fit.coef.data(), m.fit.coef.data() + m.fit.coef.size());
            models.push_back({{"target", names[static_cast<std::size_t>(m.target)]},
                              {"parents", pa},
                              {"intercept", m.fit.intercept},
                              {"coefficients", coef},
                              {"sigma2", m.fit.sigma2}});
        }
        std::vector<std::string> ts;
        for (int v : row.targets) ts.push_back(names[static_cast<std::size_t>(v)]);
        rows.push_back({{"fold", row.fold},
                        {"targets", ts},
                        {"algorithm", row.algorithm},
                        {"mode", mode_name(row.mode)},
                        {"loglik", row.loglik},
                        {"models", models}});
    }
    return {{"folds", report.folds}, {"rows", rows}};
}

}  // namespace cml
