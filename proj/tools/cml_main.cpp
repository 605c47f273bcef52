#include <charconv>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "cml/cveval.hpp"
#include "cml/discovery.hpp"
#include "cml/experiment.hpp"
#include "cml/graph_json.hpp"
#include "cml/metrics.hpp"
#include "cml/parallel.hpp"
#include "cml/simgen.hpp"

namespace fs = std::filesystem;
using namespace cml;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto pos = s.find(sep, start);
        auto piece = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        if (!piece.empty()) out.push_back(piece);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

int resolve_node(const std::vector<std::string>& names, const std::string& token) {
    for (std::size_t v = 0; v < names.size(); ++v)
        if (names[v] == token) return static_cast<int>(v);
    int idx = -1;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
    if (ec == std::errc() && ptr == token.data() + token.size() && idx >= 0 && idx < static_cast<int>(names.size()))
        return idx;
    throw InvalidArgument("unknown node '" + token + "'");
}

/// "3,8" is one target set; "3,8;1,2" is two.
std::vector<TargetSpec> parse_target_sets(const std::string& spec, const std::vector<std::string>& names) {
    std::vector<TargetSpec> out;
    for (const auto& set : split(spec, ';')) {
        std::vector<int> nodes;
        for (const auto& tok : split(set, ',')) nodes.push_back(resolve_node(names, tok));
        out.emplace_back(nodes, static_cast<int>(names.size()));
    }
    if (out.empty()) throw InvalidArgument("no targets given");
    return out;
}

std::string metrics_line(const std::string& alg, const MetricsReport& m) {
    return fmt::format("{} overall_f1={:.4f} shd={} pra_f1_loose={:.4f} pra_f1_strict={:.4f} bne_count={} ci_tests={}", alg,
                       m.overall_f1, m.shd, m.pra_f1_loose, m.pra_f1_strict, m.bne_count, m.ci_tests);
}

nlohmann::json metrics_to_json(const MetricsReport& m) {
    return {{"overall_f1", m.overall_f1},     {"shd", m.shd},
            {"pra_f1_loose", m.pra_f1_loose}, {"pra_f1_strict", m.pra_f1_strict},
            {"bne_count", m.bne_count},       {"ci_tests", m.ci_tests},
            {"mb_tests", m.mb_tests},         {"singular_tests", m.singular_tests},
            {"conflicts", m.conflicts},       {"pairs", tally_to_json(m.tally)}};
}

DiscoveryResult run_algorithm(const std::string& alg, const CiTester& tester, const TargetSpec& t, const MbConfig& mb,
                              const DiscoveryConfig& dc) {
    if (alg == "cml") return run_cml(tester, t, mb, dc);
    if (alg == "snl") return run_snl(tester, t, mb, dc);
    if (alg == "pc") return run_pc(tester, dc);
    throw InvalidArgument("unknown algorithm " + alg);
}

struct DiscoveryFlags {
    std::string network;
    std::string targets;
    std::string algs = "cml";
    double alpha_skel = 0.01;
    double alpha_mb = 0.01;
    int lmax = 3;
    std::string out;
    bool timing = false;

    void add_to(CLI::App* app, bool data_mode) {
        app->add_option("--network", network, "Ground-truth network JSON")->check(CLI::ExistingFile)->required(!data_mode);
        app->add_option("--targets", targets, "Target nodes by name or 0-based index, e.g. 3,8")->required();
        app->add_option("--alg", algs, "Comma-separated algorithms: cml, snl, pc");
        app->add_option("--alpha-skel", alpha_skel, "Significance level of skeleton tests");
        app->add_option("--alpha-mb", alpha_mb, "Significance level of Markov-blanket tests");
        app->add_option("--lmax", lmax, "Largest conditioning-set size");
        app->add_option("--out", out, "Output directory")->required();
        app->add_flag("--timing", timing, "Include wall-clock timings in result files");
    }
    MbConfig mb() const {
        MbConfig c;
        c.alpha = alpha_mb;
        c.lmax = lmax;
        return c;
    }
    DiscoveryConfig discovery() const {
        DiscoveryConfig c;
        c.alpha_skel = alpha_skel;
        c.lmax = lmax;
        return c;
    }
};

void run_discovery(const DiscoveryFlags& f, const CiTester& tester, const std::vector<std::string>& names,
                   const Dag* truth) {
    const auto sets = parse_target_sets(f.targets, names);
    fs::create_directories(f.out);
    nlohmann::json all_metrics = nlohmann::json::array();
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (const auto& alg : split(f.algs, ',')) {
            auto r = run_algorithm(alg, tester, sets[s], f.mb(), f.discovery());
            r.graph.set_names(names);
            const std::string stem = sets.size() > 1 ? fmt::format("{}_{}", alg, s) : alg;
            write_text_file(fs::path(f.out) / (stem + ".json"), result_to_json(r, f.timing).dump(2) + "\n");
            if (truth) {
                auto m = score(r, *truth, sets[s]);
                std::cout << metrics_line(alg, m) << "\n";
                auto doc = metrics_to_json(m);
                doc["algorithm"] = alg;
                doc["target_set"] = s;
                all_metrics.push_back(doc);
            } else {
                std::cout << fmt::format("{} edges={} ci_tests={}\n", alg, r.graph.num_edges(), r.ci_tests);
            }
        }
    }
    if (truth) write_text_file(fs::path(f.out) / "metrics.json", all_metrics.dump(2) + "\n");
}

bool yaml_has(const fs::path& path, const char* key) {
    try {
        return static_cast<bool>(YAML::LoadFile(path.string())[key]);
    } catch (const YAML::Exception&) {
        return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local causal structure discovery around multiple targets"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* simulate = app.add_subcommand("simulate", "Sample a dataset from a linear Gaussian SEM");
    std::string sim_network, sim_out, sim_params;
    SimConfig sim;
    simulate->add_option("--network", sim_network, "Network JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--n", sim.n, "Number of samples");
    simulate->add_option("--seed", sim.seed, "Random seed");
    simulate->add_option("--coef-lo", sim.coef_lo, "Smallest coefficient magnitude");
    simulate->add_option("--coef-hi", sim.coef_hi, "Largest coefficient magnitude");
    simulate->add_option("--sd-lo", sim.sd_lo, "Smallest noise standard deviation");
    simulate->add_option("--sd-hi", sim.sd_hi, "Largest noise standard deviation");
    simulate->add_option("--out", sim_out, "Output CSV")->required();
    simulate->add_option("--params", sim_params, "Also write the drawn SEM parameters as JSON");

    auto* discover = app.add_subcommand("discover", "Run discovery on a dataset");
    DiscoveryFlags disc_flags;
    std::string disc_data;
    disc_flags.add_to(discover, true);
    discover->add_option("--data", disc_data, "Dataset CSV")->required()->check(CLI::ExistingFile);

    auto* oracle = app.add_subcommand("oracle", "Run discovery with d-separation in the network");
    DiscoveryFlags oracle_flags;
    oracle_flags.add_to(oracle, false);

    auto* metrics = app.add_subcommand("metrics", "Score an estimated graph against a network");
    std::string met_network, met_graph, met_targets, met_out;
    metrics->add_option("--network", met_network, "Ground-truth network JSON")->required()->check(CLI::ExistingFile);
    metrics->add_option("--graph", met_graph, "Estimated graph JSON or discovery result file")->required()->check(CLI::ExistingFile);
    metrics->add_option("--targets", met_targets, "Target nodes")->required();
    metrics->add_option("--out", met_out, "Write the report JSON here instead of stdout");

    auto* cv = app.add_subcommand("cv", "k-fold held-out log-likelihood of target models");
    std::string cv_data, cv_targets, cv_out;
    CvConfig cv_cfg;
    cv->add_option("--data", cv_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
    cv->add_option("--targets", cv_targets, "Target sets, e.g. 3,8;1,2")->required();
    cv->add_option("--alg", cv_cfg.algorithm, "cml, snl or pc");
    cv->add_option("--k", cv_cfg.k, "Fold count");
    cv->add_option("--seed", cv_cfg.seed, "Fold assignment seed");
    cv->add_option("--alpha-skel", cv_cfg.discovery.alpha_skel, "Significance level of skeleton tests");
    cv->add_option("--alpha-mb", cv_cfg.mb.alpha, "Significance level of Markov-blanket tests");
    cv->add_option("--lmax", cv_cfg.discovery.lmax, "Largest conditioning-set size");
    cv->add_option("--out", cv_out, "Output directory")->required();

    auto* bench = app.add_subcommand("bench", "Run an experiment sweep from a YAML config");
    std::string bench_config, bench_out;
    bench->add_option("config", bench_config, "Experiment YAML")->required()->check(CLI::ExistingFile);
    bench->add_option("--out", bench_out, "Output directory, unless the config sets one");

    CLI11_PARSE(app, argc, argv);

    try {
        set_num_threads(threads);
        if (simulate->parsed()) {
            sim.validate();
            Dag g = load_network(sim_network);
            auto params = sample_params(g, sim);
            write_csv(sim_out, simulate_data(g, params, sim.n, sim.seed));
            if (!sim_params.empty()) write_text_file(sim_params, params_to_json(g, params).dump(2) + "\n");
        } else if (discover->parsed()) {
            Dataset d = read_csv(disc_data);
            CiTester tester = CiTester::fisher_z(covariance(d));
            if (!disc_flags.network.empty()) {
                Dag truth = load_network(disc_flags.network);
                if (truth.graph().names() != d.names) throw InvalidArgument("dataset columns do not match the network nodes");
                run_discovery(disc_flags, tester, d.names, &truth);
            } else {
                run_discovery(disc_flags, tester, d.names, nullptr);
            }
        } else if (oracle->parsed()) {
            Dag truth = load_network(oracle_flags.network);
            CiTester tester = CiTester::oracle(truth);
            run_discovery(oracle_flags, tester, truth.graph().names(), &truth);
        } else if (metrics->parsed()) {
            Dag truth = load_network(met_network);
            // Accept bare graph documents and the result files written by discover/oracle.
            auto doc = nlohmann::json::parse(read_text_file(met_graph));
            nlohmann::json graph_doc = nlohmann::json::object();
            for (const char* key : {"p", "names", "edges"})
                if (doc.contains(key)) graph_doc[key] = doc[key];
            MixedGraph est = graph_from_json(graph_doc);
            const auto sets = parse_target_sets(met_targets, truth.graph().names());
            nlohmann::json out = nlohmann::json::array();
            for (const auto& t : sets) {
                MixedGraph sub = truth_subgraph(truth, t);
                NodeSet universe = truth_universe(truth, t);
                auto tally = classify_pairs(est, sub, universe);
                out.push_back({{"overall_f1", overall_f1(est, sub, universe)},
                               {"shd", shd(est, sub, universe)},
                               {"pra_f1_loose", pra_f1(est, sub, t, PraMode::Loose)},
                               {"pra_f1_strict", pra_f1(est, sub, t, PraMode::Strict)},
                               {"pairs", tally_to_json(tally)}});
            }
            const std::string text = out.dump(2) + "\n";
            if (met_out.empty())
                std::cout << text;
            else
                write_text_file(met_out, text);
        } else if (cv->parsed()) {
            Dataset d = read_csv(cv_data);
            cv_cfg.mb.lmax = cv_cfg.discovery.lmax;
            auto report = run_cv(d, parse_target_sets(cv_targets, d.names), cv_cfg);
            fs::create_directories(cv_out);
            write_text_file(fs::path(cv_out) / "cv.csv", cv_report_csv(report, d.names));
            write_text_file(fs::path(cv_out) / "cv.json", cv_report_json(report, d.names).dump(2) + "\n");
        } else if (bench->parsed()) {
            ExperimentConfig cfg = parse_config(bench_config);
            if (!bench_out.empty() && !yaml_has(bench_config, "output")) cfg.output = bench_out;
            if (threads != 1 && !yaml_has(bench_config, "threads")) cfg.threads = threads;
            auto result = run_experiment(cfg);
            write_reports(cfg, result);
            std::cout << fmt::format("{} rows written to {}\n", result.rows.size(), cfg.output.string());
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
