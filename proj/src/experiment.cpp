#include "cml/experiment.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "cml/discovery.hpp"
#include "cml/graph_json.hpp"
#include "cml/parallel.hpp"
#include "cml/rng.hpp"

#ifndef CML_VERSION
#define CML_VERSION "0.0.0"
#endif

namespace cml {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) { return Rng::substream(seed, key).next(); }

namespace {

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& msg) {
    const auto mark = node.Mark();
    if (mark.line >= 0) throw ParseError(fmt::format("config line {}: {}", mark.line + 1, msg));
    throw ParseError("config: " + msg);
}

void reject_unknown(const YAML::Node& map, std::initializer_list<const char*> known, const std::string& where) {
    if (!map.IsMap()) fail_at(map, where + " must be a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end())
            fail_at(kv.first, fmt::format("unknown key '{}' in {}", key, where));
    }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& what) {
    if (!node.IsScalar()) fail_at(node, what + " must be a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail_at(node, fmt::format("{} has an invalid value '{}'", what, node.Scalar()));
    }
}

/// A scalar or a sequence of scalars.
template <class T>
std::vector<T> scalar_list(const YAML::Node& node, const std::string& what) {
    std::vector<T> out;
    if (node.IsSequence()) {
        for (const auto& item : node) out.push_back(scalar<T>(item, what));
        if (out.empty()) fail_at(node, what + " must not be empty");
    } else {
        out.push_back(scalar<T>(node, what));
    }
    return out;
}

void check_alphas(const YAML::Node& node, const std::vector<double>& values, const std::string& what) {
    for (double a : values)
        if (!(a > 0.0 && a < 1.0)) fail_at(node, fmt::format("{} = {} is outside (0, 1)", what, a));
}

std::pair<double, double> range(const YAML::Node& node, const std::string& what) {
    auto v = scalar_list<double>(node, what);
    if (v.size() != 2) fail_at(node, what + " must be a [low, high] pair");
    return {v[0], v[1]};
}

}  // namespace

void ExperimentConfig::validate() const {
    if (network.has_value() == random_dag.has_value()) throw InvalidArgument("exactly one of network and random_dag is required");
    if (random_dag && (random_dag->p < 2 || random_dag->count < 1 || !(random_dag->expected_degree > 0.0)))
        throw InvalidArgument("random_dag needs p >= 2, count >= 1 and a positive expected_degree");
    if (algorithms.empty()) throw InvalidArgument("at least one algorithm is required");
    for (const auto& a : algorithms)
        if (a != "cml" && a != "snl" && a != "pc") throw InvalidArgument("unknown algorithm " + a);
    auto check = [](const std::vector<double>& v, const char* what) {
        if (v.empty()) throw InvalidArgument(std::string(what) + " must not be empty");
        for (double a : v)
            if (!(a > 0.0 && a < 1.0)) throw InvalidArgument(fmt::format("{} = {} is outside (0, 1)", what, a));
    };
    check(alpha_mb, "alpha_mb");
    check(alpha_skel, "alpha_skel");
    if (lmax.empty()) throw InvalidArgument("lmax must not be empty");
    for (int l : lmax)
        if (l < 0) throw InvalidArgument("lmax must be non-negative");
    if (!oracle) {
        sim.validate();
        if (sample_sizes.empty()) throw InvalidArgument("simulation.n must not be empty");
        for (int n : sample_sizes)
            if (n < 4) throw InvalidArgument("sample sizes must be at least 4");
        if (datasets < 1) throw InvalidArgument("simulation.datasets must be positive");
    }
    if (target_sets.empty() && (selection.count < 1 || selection.sizes.empty()))
        throw InvalidArgument("targets need explicit sets or a selection with count >= 1");
    if (threads < 1) throw InvalidArgument("threads must be positive");
}

std::vector<std::pair<double, double>> ExperimentConfig::alpha_pairs() const {
    std::vector<std::pair<double, double>> out;
    for (double am : alpha_mb)
        for (double as : alpha_skel) out.emplace_back(am, as);
    return out;
}

ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& ex) {
        throw ParseError(fmt::format("config line {}: {}", ex.mark.line + 1, ex.msg));
    }
    if (!root.IsMap()) throw ParseError("config: top level must be a mapping");
    reject_unknown(root,
                   {"network", "random_dag", "mode", "simulation", "targets", "algorithms", "alpha_mb", "alpha_skel",
                    "lmax", "seed", "threads", "output"},
                   "the top level");

    ExperimentConfig cfg;
    if (auto n = root["network"]) {
        std::filesystem::path p = scalar<std::string>(n, "network");
        cfg.network = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (auto r = root["random_dag"]) {
        reject_unknown(r, {"p", "expected_degree", "count"}, "random_dag");
        RandomDagSpec spec;
        if (r["p"]) spec.p = scalar<int>(r["p"], "random_dag.p");
        if (r["expected_degree"]) spec.expected_degree = scalar<double>(r["expected_degree"], "random_dag.expected_degree");
        if (r["count"]) spec.count = scalar<int>(r["count"], "random_dag.count");
        cfg.random_dag = spec;
    }
    if (cfg.network.has_value() == cfg.random_dag.has_value())
        fail_at(root, "exactly one of 'network' and 'random_dag' is required");

    if (auto m = root["mode"]) {
        auto mode = scalar<std::string>(m, "mode");
        if (mode != "oracle" && mode != "sample") fail_at(m, "mode must be 'oracle' or 'sample'");
        cfg.oracle = mode == "oracle";
    }
    if (auto s = root["simulation"]) {
        reject_unknown(s, {"n", "coef", "sd", "datasets"}, "simulation");
        if (s["n"]) cfg.sample_sizes = scalar_list<int>(s["n"], "simulation.n");
        if (s["coef"]) std::tie(cfg.sim.coef_lo, cfg.sim.coef_hi) = range(s["coef"], "simulation.coef");
        if (s["sd"]) std::tie(cfg.sim.sd_lo, cfg.sim.sd_hi) = range(s["sd"], "simulation.sd");
        if (s["datasets"]) cfg.datasets = scalar<int>(s["datasets"], "simulation.datasets");
        for (int n : cfg.sample_sizes)
            if (n < 4) fail_at(s["n"], "sample sizes must be at least 4");
        try {
            cfg.sim.validate();
        } catch (const InvalidArgument& ex) {
            fail_at(s, ex.what());
        }
    }
    if (auto t = root["targets"]) {
        reject_unknown(t, {"sets", "select"}, "targets");
        if (auto sets = t["sets"]) {
            if (!sets.IsSequence()) fail_at(sets, "targets.sets must be a list of lists");
            for (const auto& set : sets) {
                auto names = scalar_list<std::string>(set, "target");
                cfg.target_sets.push_back(names);
            }
        }
        if (auto sel = t["select"]) {
            reject_unknown(sel, {"sizes", "count", "min_nodes", "max_nodes", "min_edges", "max_edges"}, "targets.select");
            if (sel["sizes"]) cfg.selection.sizes = scalar_list<int>(sel["sizes"], "targets.select.sizes");
            if (sel["count"]) cfg.selection.count = scalar<int>(sel["count"], "targets.select.count");
            if (sel["min_nodes"]) cfg.selection.filter.min_nodes = scalar<int>(sel["min_nodes"], "min_nodes");
            if (sel["max_nodes"]) cfg.selection.filter.max_nodes = scalar<int>(sel["max_nodes"], "max_nodes");
            if (sel["min_edges"]) cfg.selection.filter.min_edges = scalar<int>(sel["min_edges"], "min_edges");
            if (sel["max_edges"]) cfg.selection.filter.max_edges = scalar<int>(sel["max_edges"], "max_edges");
        }
    } else {
        fail_at(root, "missing 'targets' section");
    }
    auto algs = root["algorithms"];
    if (!algs) fail_at(root, "missing 'algorithms'");
    if (algs.IsSequence() && algs.size() == 0) fail_at(algs, "algorithms must not be empty");
    for (const auto& a : scalar_list<std::string>(algs, "algorithms")) {
        if (a != "cml" && a != "snl" && a != "pc") fail_at(algs, "unknown algorithm '" + a + "'");
        cfg.algorithms.push_back(a);
    }
    if (auto a = root["alpha_mb"]) {
        cfg.alpha_mb = scalar_list<double>(a, "alpha_mb");
        check_alphas(a, cfg.alpha_mb, "alpha_mb");
    }
    if (auto a = root["alpha_skel"]) {
        cfg.alpha_skel = scalar_list<double>(a, "alpha_skel");
        check_alphas(a, cfg.alpha_skel, "alpha_skel");
    }
    if (auto l = root["lmax"]) {
        cfg.lmax = scalar_list<int>(l, "lmax");
        for (int v : cfg.lmax)
            if (v < 0) fail_at(l, "lmax must be non-negative");
    }
    if (auto s = root["seed"]) cfg.seed = scalar<std::uint64_t>(s, "seed");
    if (auto t = root["threads"]) {
        cfg.threads = scalar<int>(t, "threads");
        if (cfg.threads < 1) fail_at(t, "threads must be positive");
    }
    if (auto o = root["output"]) cfg.output = scalar<std::string>(o, "output");
    try {
        cfg.validate();
    } catch (const InvalidArgument& ex) {
        throw ParseError(std::string("config: ") + ex.what());
    }
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    return parse_config_text(read_text_file(path), path.parent_path());
}

namespace {

std::vector<int> resolve_targets(const MixedGraph& g, const std::vector<std::string>& names) {
    std::vector<int> out;
    for (const auto& name : names) {
        auto v = g.find(name);
        if (!v) throw InvalidArgument("unknown target node '" + name + "'");
        out.push_back(*v);
    }
    return out;
}

struct Setting {
    int lmax;
    double alpha_mb;
    double alpha_skel;
};

void run_cells(const ExperimentConfig& cfg, const Dag& dag, const std::vector<TargetSpec>& targets, const CiTester& tester,
               const MetricsRow& base, std::vector<MetricsRow>& rows) {
    std::vector<Setting> settings;
    for (int l : cfg.lmax)
        for (auto [am, as] : cfg.alpha_pairs()) settings.push_back({l, am, as});
    for (const auto& s : settings) {
        MbConfig mb;
        mb.alpha = s.alpha_mb;
        mb.lmax = s.lmax;
        DiscoveryConfig dc;
        dc.alpha_skel = s.alpha_skel;
        dc.lmax = s.lmax;
        std::optional<DiscoveryResult> pc;
        for (const auto& t : targets) {
            for (const auto& alg : cfg.algorithms) {
                MetricsRow row = base;
                row.algorithm = alg;
                row.lmax = s.lmax;
                row.alpha_mb = s.alpha_mb;
                row.alpha_skel = s.alpha_skel;
                for (int v : t) row.targets.push_back(dag.graph().name(v));
                try {
                    if (alg == "pc") {
                        if (!pc) pc = run_pc(tester, dc);
                        row.metrics = score(*pc, dag, t);
                    } else {
                        auto r = alg == "cml" ? run_cml(tester, t, mb, dc) : run_snl(tester, t, mb, dc);
                        row.metrics = score(r, dag, t);
                    }
                } catch (const std::exception& ex) {
                    row.status = ex.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int previous_threads = num_threads();
    set_num_threads(cfg.threads);
    ExperimentResult result;
    try {
        const int networks = cfg.random_dag ? cfg.random_dag->count : 1;
        for (int r = 0; r < networks; ++r) {
            const std::uint64_t net_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
            const std::uint64_t dag_seed = derive_seed(net_seed, 3);
            Dag dag = cfg.random_dag ? random_dag(cfg.random_dag->p, cfg.random_dag->expected_degree, dag_seed)
                                     : load_network(*cfg.network);
            MetricsRow base;
            base.network = cfg.random_dag ? fmt::format("random_p{}_{}", cfg.random_dag->p, r)
                                          : cfg.network->stem().string();
            base.replicate = r;
            base.dag_seed = cfg.random_dag ? dag_seed : 0;
            if (cfg.random_dag) result.seeds.emplace_back(fmt::format("dag[{}]", r), dag_seed);

            std::vector<TargetSpec> targets;
            if (!cfg.target_sets.empty()) {
                for (const auto& names : cfg.target_sets) targets.emplace_back(resolve_targets(dag.graph(), names), dag.size());
            } else {
                const std::uint64_t target_seed = derive_seed(net_seed, 4);
                result.seeds.emplace_back(fmt::format("targets[{}]", r), target_seed);
                targets = select_targets(dag, cfg.selection.sizes, cfg.selection.count, target_seed, cfg.selection.filter);
            }

            if (cfg.oracle) {
                CiTester tester = CiTester::oracle(dag);
                run_cells(cfg, dag, targets, tester, base, result.rows);
                continue;
            }
            for (int d = 0; d < cfg.datasets; ++d) {
                const std::uint64_t data_seed = derive_seed(net_seed, 16 + static_cast<std::uint64_t>(d));
                result.seeds.emplace_back(fmt::format("data[{}][{}]", r, d), data_seed);
                SimConfig sim = cfg.sim;
                sim.seed = data_seed;
                const SemParams params = sample_params(dag, sim);
                for (int n : cfg.sample_sizes) {
                    MetricsRow cell = base;
                    cell.data_seed = data_seed;
                    cell.n = n;
                    try {
                        CiTester tester = CiTester::fisher_z(covariance(simulate_data(dag, params, n, data_seed)));
                        run_cells(cfg, dag, targets, tester, cell, result.rows);
                    } catch (const std::exception& ex) {
                        cell.status = ex.what();
                        cell.algorithm = "-";
                        result.rows.push_back(cell);
                    }
                }
            }
        }
    } catch (...) {
        set_num_threads(previous_threads);
        throw;
    }
    set_num_threads(previous_threads);
    return result;
}

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += sep;
        out += v[k];
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string key_fields(const MetricsRow& r) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{}", csv_field(r.network), r.replicate, r.dag_seed, r.data_seed, r.n,
                       join(r.targets, " "), r.algorithm, r.alpha_mb, r.alpha_skel, r.lmax);
}

constexpr const char* kKeyHeader = "network,replicate,dag_seed,data_seed,n,targets,algorithm,alpha_mb,alpha_skel,lmax";

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = std::string(kKeyHeader) +
                      ",status,overall_f1,shd,pra_f1_loose,pra_f1_strict,bne_count,ci_tests,mb_tests,singular_tests,conflicts\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", key_fields(r), csv_field(r.status), m.overall_f1, m.shd,
                           m.pra_f1_loose, m.pra_f1_strict, m.bne_count, m.ci_tests, m.mb_tests, m.singular_tests,
                           m.conflicts);
    }
    return out;
}

nlohmann::json metrics_json(const std::vector<MetricsRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        out.push_back({{"network", r.network},
                       {"replicate", r.replicate},
                       {"dag_seed", r.dag_seed},
                       {"data_seed", r.data_seed},
                       {"n", r.n},
                       {"targets", r.targets},
                       {"algorithm", r.algorithm},
                       {"alpha_mb", r.alpha_mb},
                       {"alpha_skel", r.alpha_skel},
                       {"lmax", r.lmax},
                       {"status", r.status},
                       {"overall_f1", m.overall_f1},
                       {"shd", m.shd},
                       {"pra_f1_loose", m.pra_f1_loose},
                       {"pra_f1_strict", m.pra_f1_strict},
                       {"bne_count", m.bne_count},
                       {"ci_tests", m.ci_tests},
                       {"mb_tests", m.mb_tests},
                       {"singular_tests", m.singular_tests},
                       {"conflicts", m.conflicts}});
    }
    return out;
}

std::string timings_csv(const std::vector<MetricsRow>& rows) {
    std::string out = std::string(kKeyHeader) + ",runtime_ms\n";
    for (const auto& r : rows) out += fmt::format("{},{:.3f}\n", key_fields(r), r.metrics.runtime_ms);
    return out;
}

std::string summary_csv(const std::vector<MetricsRow>& rows) {
    struct Group {
        std::vector<double> bne, f1, tests;
    };
    std::map<std::tuple<std::string, std::size_t, std::string>, Group> groups;
    for (const auto& r : rows) {
        if (r.status != "ok") continue;
        auto& g = groups[{r.network, r.targets.size(), r.algorithm}];
        g.bne.push_back(r.metrics.bne_count);
        g.f1.push_back(r.metrics.overall_f1);
        g.tests.push_back(static_cast<double>(r.metrics.ci_tests));
    }
    std::string out = "network,target_size,algorithm,runs,median_bne_count,median_overall_f1,median_ci_tests\n";
    for (const auto& [key, g] : groups)
        out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(std::get<0>(key)), std::get<1>(key), std::get<2>(key),
                           g.bne.size(), median(g.bne), median(g.f1), median(g.tests));
    return out;
}

nlohmann::json manifest_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& [label, value] : result.seeds) seeds.push_back({{"stream", label}, {"seed", value}});
    std::vector<std::vector<std::string>> sets = cfg.target_sets;
    nlohmann::json config = {{"mode", cfg.oracle ? "oracle" : "sample"},
                             {"algorithms", cfg.algorithms},
                             {"alpha_mb", cfg.alpha_mb},
                             {"alpha_skel", cfg.alpha_skel},
                             {"lmax", cfg.lmax},
                             {"seed", cfg.seed},
                             {"target_sets", sets}};
    if (cfg.network) config["network"] = cfg.network->filename().string();
    if (cfg.random_dag)
        config["random_dag"] = {{"p", cfg.random_dag->p},
                                {"expected_degree", cfg.random_dag->expected_degree},
                                {"count", cfg.random_dag->count}};
    if (!cfg.oracle)
        config["simulation"] = {{"n", cfg.sample_sizes},
                                {"coef", {cfg.sim.coef_lo, cfg.sim.coef_hi}},
                                {"sd", {cfg.sim.sd_lo, cfg.sim.sd_hi}},
                                {"datasets", cfg.datasets}};
    if (cfg.target_sets.empty())
        config["target_selection"] = {{"sizes", cfg.selection.sizes},
                                      {"count", cfg.selection.count},
                                      {"min_nodes", cfg.selection.filter.min_nodes},
                                      {"max_nodes", cfg.selection.filter.max_nodes},
                                      {"min_edges", cfg.selection.filter.min_edges},
                                      {"max_edges", cfg.selection.filter.max_edges}};
    int failed = 0;
    for (const auto& r : result.rows) failed += r.status == "ok" ? 0 : 1;
    return {{"version", CML_VERSION},
            {"config", config},
            {"seeds", seeds},
            {"rows", result.rows.size()},
            {"failed_rows", failed},
            {"files", {"metrics.csv", "metrics.json", "summary.csv", "timings.csv"}}};
}

void write_reports(const ExperimentConfig& cfg, const ExperimentResult& result) {
    std::filesystem::create_directories(cfg.output);
    write_text_file(cfg.output / "metrics.csv", metrics_csv(result.rows));
    write_text_file(cfg.output / "metrics.json", metrics_json(result.rows).dump(2) + "\n");
    write_text_file(cfg.output / "summary.csv", summary_csv(result.rows));
    write_text_file(cfg.output / "manifest.json", manifest_json(cfg, result).dump(2) + "\n");
    write_text_file(cfg.output / "timings.csv", timings_csv(result.rows));
}

}  // namespace cml
