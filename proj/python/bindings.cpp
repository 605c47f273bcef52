#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cml/cveval.hpp"
#include "cml/discovery.hpp"
#include "cml/metrics.hpp"
#include "cml/parallel.hpp"
#include "cml/separation.hpp"
#include "cml/simgen.hpp"

namespace py = pybind11;
using namespace cml;

namespace {

MbConfig mb_config(double alpha_mb, int lmax) { return MbConfig{alpha_mb, lmax}; }

DiscoveryConfig discovery_config(double alpha_skel, int lmax) {
    DiscoveryConfig cfg;
    cfg.alpha_skel = alpha_skel;
    cfg.lmax = lmax;
    return cfg;
}

DiscoveryResult run(const std::string& algorithm, const CiTester& tester, const TargetSpec& t, double alpha_skel,
                    double alpha_mb, int lmax) {
    const auto mb = mb_config(alpha_mb, lmax);
    const auto cfg = discovery_config(alpha_skel, lmax);
    if (algorithm == "cml") return run_cml(tester, t, mb, cfg);
    if (algorithm == "snl") return run_snl(tester, t, mb, cfg);
    if (algorithm == "pc") return run_pc(tester, cfg);
    throw InvalidArgument("unknown algorithm '" + algorithm + "' (expected cml, snl or pc)");
}

py::dict metrics_dict(const MetricsReport& m) {
    py::dict d;
    d["overall_f1"] = m.overall_f1;
    d["shd"] = m.shd;
    d["pra_f1_loose"] = m.pra_f1_loose;
    d["pra_f1_strict"] = m.pra_f1_strict;
    d["bne_count"] = m.bne_count;
    d["ci_tests"] = m.ci_tests;
    d["mb_tests"] = m.mb_tests;
    d["conflicts"] = m.conflicts;
    return d;
}

/// Result document as a JSON string (decoded on the Python side), with
/// metrics attached when the true network is known.
std::string finish(DiscoveryResult r, const std::vector<std::string>& names, const Dag* truth, const TargetSpec& t,
                   py::dict& metrics) {
    r.graph.set_names(names);
    if (truth) metrics.attr("update")(metrics_dict(score(r, *truth, t)));
    return result_to_json(r, false).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coordinated multi-neighborhood causal structure learning";

    // Translators run in reverse registration order, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<CyclicInput>(m, "CyclicInput", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("set_num_threads", &set_num_threads, py::arg("n"));
    m.def("num_threads", &num_threads);

    py::class_<Dag>(m, "Network")
        .def(py::init([](int p, const std::vector<std::pair<int, int>>& edges, std::vector<std::string> names) {
                 return Dag(p, edges, std::move(names));
             }),
             py::arg("p"), py::arg("edges"), py::arg("names") = std::vector<std::string>{})
        .def_static("load", [](const std::string& path) { return load_network(path); }, py::arg("path"))
        .def_static("random", &random_dag, py::arg("p"), py::arg("expected_degree"), py::arg("seed"))
        .def_property_readonly("p", &Dag::size)
        .def_property_readonly("names", [](const Dag& g) { return g.graph().names(); })
        .def_property_readonly("edges", &Dag::edge_list)
        .def("parents", &Dag::parents, py::arg("v"))
        .def("markov_blanket", [](const Dag& g, int v) { return markov_blanket(g, v); }, py::arg("v"))
        .def("__repr__", [](const Dag& g) {
            return "Network(p=" + std::to_string(g.size()) + ", edges=" + std::to_string(g.edge_list().size()) + ")";
        });

    m.def(
        "simulate",
        [](const Dag& g, int n, std::uint64_t seed, std::pair<double, double> coef, std::pair<double, double> sd) {
            SimConfig sim;
            sim.n = n;
            sim.seed = seed;
            std::tie(sim.coef_lo, sim.coef_hi) = coef;
            std::tie(sim.sd_lo, sim.sd_hi) = sd;
            sim.validate();
            Eigen::MatrixXd values = simulate_data(g, sample_params(g, sim), n, seed).values;
            return values;
        },
        py::arg("network"), py::arg("n"), py::arg("seed"), py::arg("coef") = std::pair{0.4, 0.75},
        py::arg("sd") = std::pair{0.1, 0.5}, "Samples n rows from a random linear Gaussian SEM over the network.");

    m.def(
        "_discover",
        [](const Eigen::MatrixXd& data, std::vector<std::string> names, const std::vector<int>& targets,
           const std::string& algorithm, double alpha_skel, double alpha_mb, int lmax, const Dag* truth) {
            Dataset d{data, std::move(names)};
            if (d.names.empty())
                for (int v = 0; v < d.p(); ++v) d.names.push_back("X" + std::to_string(v + 1));
            if (static_cast<int>(d.names.size()) != d.p()) throw InvalidArgument("name count does not match column count");
            if (truth && truth->size() != d.p()) throw InvalidArgument("network size does not match column count");
            TargetSpec t(targets, d.p());
            CiTester tester = CiTester::fisher_z(covariance(d));
            py::dict metrics;
            std::string doc;
            {
                py::gil_scoped_release release;
                DiscoveryResult r = run(algorithm, tester, t, alpha_skel, alpha_mb, lmax);
                py::gil_scoped_acquire acquire;
                doc = finish(std::move(r), d.names, truth, t, metrics);
            }
            return py::make_tuple(doc, metrics);
        },
        py::arg("data"), py::arg("names"), py::arg("targets"), py::arg("algorithm"), py::arg("alpha_skel"),
        py::arg("alpha_mb"), py::arg("lmax"), py::arg("network") = nullptr);

    m.def(
        "_discover_oracle",
        [](const Dag& g, const std::vector<int>& targets, const std::string& algorithm, int lmax) {
            TargetSpec t(targets, g.size());
            CiTester tester = CiTester::oracle(g);
            DiscoveryResult r = run(algorithm, tester, t, 0.01, 0.01, lmax);
            py::dict metrics;
            std::string doc = finish(std::move(r), g.graph().names(), &g, t, metrics);
            return py::make_tuple(doc, metrics);
        },
        py::arg("network"), py::arg("targets"), py::arg("algorithm"), py::arg("lmax"));

    m.def("kfold_split", &kfold_split, py::arg("n"), py::arg("k"), py::arg("seed"),
          "Partitions range(n) into k sorted folds whose sizes differ by at most one.");
}
