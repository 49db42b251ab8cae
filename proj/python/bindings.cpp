#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "steadynet/config.hpp"
#include "steadynet/dynamics.hpp"
#include "steadynet/errors.hpp"
#include "steadynet/experiments.hpp"
#include "steadynet/metrics.hpp"
#include "steadynet/networks.hpp"
#include "steadynet/optimizer.hpp"

namespace py = pybind11;
using namespace steadynet;

namespace {

Directedness directedness(bool directed) { return directed ? Directedness::directed : Directedness::undirected; }

ScoredEdges scored(std::vector<double> scores, std::vector<int> labels) {
    if (scores.size() != labels.size()) throw ArgumentError("scores and labels differ in length");
    return {std::move(scores), std::move(labels)};
}

py::dict metrics_dict(const BinaryMetrics& b) {
    return py::dict(py::arg("accuracy") = b.accuracy, py::arg("precision") = b.precision,
                    py::arg("recall") = b.recall, py::arg("f1") = b.f1, py::arg("tp") = b.tp, py::arg("fp") = b.fp,
                    py::arg("tn") = b.tn, py::arg("fn") = b.fn);
}

py::dict aggregate_dict(const Aggregate& a) {
    auto ms = [](const MeanStd& v) { return py::make_tuple(v.mean, v.std); };
    return py::dict(py::arg("n_ok") = a.n_ok, py::arg("n_failed") = a.n_failed,
                    py::arg("n_success") = a.n_success, py::arg("auc") = ms(a.auc),
                    py::arg("accuracy") = ms(a.accuracy), py::arg("precision") = ms(a.precision),
                    py::arg("recall") = ms(a.recall), py::arg("f1") = ms(a.f1));
}

}  // namespace

PYBIND11_MODULE(_steadynet, m) {
    m.doc() = "Network reconstruction from steady states of coupled phase oscillators";

    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<PairwiseNetwork>(m, "PairwiseNetwork")
        .def(py::init([](std::size_t n, bool directed) { return PairwiseNetwork(n, directedness(directed)); }),
             py::arg("n"), py::arg("directed") = false)
        .def_property_readonly("n", &PairwiseNetwork::size)
        .def_property_readonly("directed", &PairwiseNetwork::directed)
        .def("__call__", [](const PairwiseNetwork& w, std::size_t i, std::size_t j) {
            if (i >= w.size() || j >= w.size()) throw py::index_error("node index out of range");
            return w(i, j);
        })
        .def("set", &PairwiseNetwork::set, py::arg("i"), py::arg("j"), py::arg("w"))
        .def("edge_count", &PairwiseNetwork::edge_count)
        .def("matrix", [](const PairwiseNetwork& w) {
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < w.size(); ++i) rows.emplace_back(w.row(i).begin(), w.row(i).end());
            return rows;
        })
        .def("to_json", [](const PairwiseNetwork& w) { return to_json(Structure(w)); });

    py::class_<HyperNetwork>(m, "HyperNetwork")
        .def(py::init<std::size_t, int>(), py::arg("n"), py::arg("order") = 2)
        .def_property_readonly("n", &HyperNetwork::size)
        .def_property_readonly("order", &HyperNetwork::order)
        .def("set", [](HyperNetwork& h, std::vector<int> tuple, double w) { h.set(tuple, w); })
        .def("weight", [](const HyperNetwork& h, std::vector<int> tuple) { return h.weight(tuple); })
        .def("edge_count", &HyperNetwork::edge_count)
        .def("edges", [](const HyperNetwork& h) {
            std::vector<std::pair<std::vector<int>, double>> out;
            for (std::size_t e = 0; e < h.edge_count(); ++e) {
                const auto nodes = h.edge_nodes(e);
                out.emplace_back(std::vector<int>(nodes.begin(), nodes.end()), h.edge_weight(e));
            }
            return out;
        })
        .def("to_json", [](const HyperNetwork& h) { return to_json(Structure(h)); });

    m.def("gen_er", [](std::size_t n, double p, bool directed, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        return gen_er(n, p, directedness(directed), rng);
    }, py::arg("n"), py::arg("p"), py::arg("directed") = false, py::arg("seed") = 0);
    m.def("gen_weighted", [](std::size_t n, double p, bool directed, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        return gen_weighted(n, p, directedness(directed), rng);
    }, py::arg("n"), py::arg("p"), py::arg("directed") = false, py::arg("seed") = 0);
    m.def("gen_simplex", [](std::size_t n, int order, double p, std::uint64_t seed) {
        Rng rng = make_rng(seed);
        return gen_simplex(n, order, p, rng);
    }, py::arg("n"), py::arg("order"), py::arg("p"), py::arg("seed") = 0);

    m.def("load_edge_list", [](const std::filesystem::path& path, bool directed, bool weighted) {
        auto r = load_edge_list(path, directedness(directed), weighted);
        return py::dict(py::arg("network") = std::move(r.network), py::arg("labels") = r.labels,
                        py::arg("self_loops") = r.self_loops, py::arg("duplicates") = r.duplicates);
    }, py::arg("path"), py::arg("directed") = false, py::arg("weighted") = false);

    m.def("is_connected", [](const PairwiseNetwork& w) { return is_connected(w); });
    m.def("is_connected", [](const HyperNetwork& h) { return is_connected(h); });

    m.def("rhs", [](const std::string& model, std::vector<double> x, std::vector<double> omega,
                    const PairwiseNetwork& w, double alpha) {
        ConditionParams p;
        p.omega = std::move(omega);
        p.alpha = alpha;
        return make_model(model)->rhs(x, p, w);
    }, py::arg("model"), py::arg("x"), py::arg("omega"), py::arg("network"), py::arg("alpha") = 0.0);
    m.def("rhs", [](std::vector<double> x, std::vector<double> omega, const HyperNetwork& h) {
        ConditionParams p;
        p.omega = std::move(omega);
        return make_model("hyper_kuramoto", h.order())->rhs(x, p, h);
    }, py::arg("x"), py::arg("omega"), py::arg("network"));

    m.def("auc", [](std::vector<double> s, std::vector<int> l) { return auc(scored(std::move(s), std::move(l))); },
          py::arg("scores"), py::arg("labels"));
    m.def("roc_curve", [](std::vector<double> s, std::vector<int> l) {
        return roc_curve(scored(std::move(s), std::move(l)));
    }, py::arg("scores"), py::arg("labels"));
    m.def("binary_metrics", [](std::vector<double> s, std::vector<int> l, double threshold) {
        return metrics_dict(binary_metrics(scored(std::move(s), std::move(l)), threshold));
    }, py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);

    m.def("natural_step", [](std::vector<double> theta, std::vector<double> grad, double eta, double eps) {
        if (theta.size() != grad.size()) throw ArgumentError("theta and grad differ in length");
        natural_step(theta, grad, eta, eps);
        return theta;
    }, py::arg("theta"), py::arg("grad"), py::arg("eta") = 5e-3, py::arg("eps_fisher") = 1e-6);

    py::class_<ExperimentConfig>(m, "Config")
        .def_readwrite("name", &ExperimentConfig::name)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("repeats", &ExperimentConfig::repeats)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def_readwrite("output", &ExperimentConfig::output)
        .def_property("m", [](const ExperimentConfig& c) { return c.dataset.m; },
                      [](ExperimentConfig& c, std::size_t v) { c.dataset.m = v; })
        .def_property("n", [](const ExperimentConfig& c) { return c.network.n; },
                      [](ExperimentConfig& c, std::size_t v) { c.network.n = v; })
        .def("validate", &ExperimentConfig::validate)
        .def("to_json", &ExperimentConfig::to_json)
        .def("hash", &ExperimentConfig::hash);

    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));

    m.def("run_pipeline", [](const ExperimentConfig& cfg, std::optional<std::filesystem::path> out) {
        ReconResult res;
        {
            py::gil_scoped_release release;
            cfg.validate();
            res = run_pipeline(cfg);
            if (out) write_pipeline_outputs(*out, cfg, res);
        }
        py::list repeats;
        for (const auto& r : res.repeats)
            repeats.append(py::dict(py::arg("repeat") = r.repeat, py::arg("seed") = r.seed, py::arg("ok") = r.ok,
                                    py::arg("failure") = r.failure, py::arg("auc") = r.evaluation.auc,
                                    py::arg("success") = r.evaluation.success,
                                    py::arg("final_loss") = r.final_loss));
        return py::dict(py::arg("config_hash") = res.config_hash, py::arg("aggregate") = aggregate_dict(res.aggregate),
                        py::arg("repeats") = repeats);
    }, py::arg("config"), py::arg("out") = py::none());
}
