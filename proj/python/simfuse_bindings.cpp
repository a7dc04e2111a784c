#include <cstdint>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "simfuse/bench.hpp"
#include "simfuse/cluster.hpp"
#include "simfuse/dataset.hpp"
#include "simfuse/graph.hpp"
#include "simfuse/integrate.hpp"
#include "simfuse/io.hpp"
#include "simfuse/metrics.hpp"
#include "simfuse/similarity.hpp"

namespace py = pybind11;
using namespace simfuse;

namespace {

Labels to_labels(const std::vector<int>& a) { return Labels::from_assignments(a); }

std::string orientation_name(Orientation o) {
    return o == Orientation::Distance ? "distance" : "affinity";
}

Orientation orientation_from_name(const std::string& s) {
    if (s == "distance") return Orientation::Distance;
    if (s == "affinity") return Orientation::Affinity;
    throw std::invalid_argument("unknown orientation: " + s);
}

FusionParams make_params(int k, double mu, double sigma, int snf_max_iters, double snf_tol) {
    FusionParams p;
    p.kernel.k_neighbors = k;
    p.kernel.mu = mu;
    p.threshold_sigma = sigma;
    p.snf_max_iters = snf_max_iters;
    p.snf_tol = snf_tol;
    return p;
}

py::dict stats_dict(const GraphStats& st) {
    py::dict d;
    d["n_nodes"] = st.n_nodes;
    d["n_edges"] = st.n_edges;
    d["min_degree"] = st.min_degree;
    d["mean_degree"] = st.mean_degree;
    d["median_degree"] = st.median_degree;
    d["modularity_truth"] = st.modularity_truth;
    d["tpr_truth"] = st.tpr_truth;
    d["assortativity"] = st.assortativity.defined ? py::object(py::float_(st.assortativity.value))
                                                  : py::object(py::none());
    d["mean_path_length"] = st.mean_path_length.defined
                                ? py::object(py::float_(st.mean_path_length.value))
                                : py::object(py::none());
    return d;
}

}  // namespace

PYBIND11_MODULE(_simfuse, m) {
    m.doc() = "Multi-modal similarity integration: generators, fusion, graphs, clustering";

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("n_modalities", &Dataset::n_modalities)
        .def_property_readonly("problem", [](const Dataset& d) { return d.problem; })
        .def_property_readonly("truth", [](const Dataset& d) { return d.truth.assignments; })
        .def_property_readonly("n_clusters", [](const Dataset& d) { return d.truth.n_clusters; })
        .def_property_readonly("partial_mask",
                               [](const Dataset& d) -> py::object {
                                   if (!d.partial_mask) return py::none();
                                   return py::cast(d.partial_mask->assignments);
                               })
        .def("features", [](const Dataset& d, int i) { return d.modalities.at(i).features; })
        .def("present",
             [](const Dataset& d, int i) {
                 const auto& p = d.modalities.at(i).present;
                 return std::vector<bool>(p.begin(), p.end());
             })
        .def("__repr__", [](const Dataset& d) {
            return "<Dataset problem='" + d.problem + "' n=" + std::to_string(d.n()) +
                   " modalities=" + std::to_string(d.n_modalities()) + ">";
        });

    py::class_<SimilarityMatrix>(m, "SimilarityMatrix")
        .def_property_readonly("values", [](const SimilarityMatrix& s) { return s.values; })
        .def_property_readonly("orientation",
                               [](const SimilarityMatrix& s) { return orientation_name(s.orientation); })
        .def_property_readonly("degenerate", [](const SimilarityMatrix& s) { return s.degenerate; })
        .def_property_readonly("n", &SimilarityMatrix::n);

    py::class_<FuseResult>(m, "FuseResult")
        .def_property_readonly("values", [](const FuseResult& r) { return r.fused.values; })
        .def_property_readonly("orientation",
                               [](const FuseResult& r) { return orientation_name(r.fused.orientation); })
        .def_property_readonly("snf_converged", [](const FuseResult& r) { return r.snf_converged; })
        .def_property_readonly("snf_iterations", [](const FuseResult& r) { return r.snf_iterations; });

    py::class_<Graph>(m, "Graph")
        .def_property_readonly("n_nodes", [](const Graph& g) { return g.n_nodes; })
        .def_property_readonly("n_edges", &Graph::n_edges)
        .def("degree", &Graph::degree)
        .def("edges",
             [](const Graph& g) {
                 std::vector<std::tuple<int, int, double>> out;
                 out.reserve(g.edges.size());
                 for (const auto& e : g.edges) out.emplace_back(e.u, e.v, e.w);
                 return out;
             })
        .def("__repr__", [](const Graph& g) {
            return "<Graph n_nodes=" + std::to_string(g.n_nodes) +
                   " n_edges=" + std::to_string(g.n_edges()) + ">";
        });

    m.def("problem_names", &problem_names, "Names of the benchmark problems");

    m.def(
        "build_problem",
        [](const std::string& name, int n, std::uint64_t seed, int n_clusters, int n_features,
           double center_scale) {
            GenParams gp;
            gp.center_scale = center_scale;
            return build_problem(name, n, seed, n_clusters, n_features, gp);
        },
        py::arg("name"), py::arg("n"), py::arg("seed"), py::arg("n_clusters") = 10,
        py::arg("n_features") = 50, py::arg("center_scale") = 0.35,
        "Generate a named multi-modal benchmark problem");

    m.def("mask_random", &mask_random, py::arg("dataset"), py::arg("fraction"), py::arg("seed"),
          "Hide one random modality for a random fraction of entities");
    m.def("mask_cluster", &mask_cluster, py::arg("dataset"), py::arg("fraction"), py::arg("seed"),
          "Hide one modality for a fraction of each cluster-aligned group");

    m.def(
        "fuse",
        [](const Dataset& ds, const std::string& method, const std::string& policy, int k, double mu,
           double sigma, int snf_max_iters, double snf_tol) {
            return fuse_modalities(ds, method_from_string(method), policy_from_string(policy),
                                   make_params(k, mu, sigma, snf_max_iters, snf_tol));
        },
        py::arg("dataset"), py::arg("method"), py::arg("policy") = "none", py::arg("k") = 15,
        py::arg("mu") = 0.5, py::arg("sigma") = 1.0, py::arg("snf_max_iters") = 20,
        py::arg("snf_tol") = 1e-6,
        "Fuse all modalities with one of: concat, mean, extreme, snf, nemo");

    m.def(
        "partial_policies",
        [](const std::string& method) {
            std::vector<std::string> out;
            for (PartialPolicy p : partial_policies(method_from_string(method)))
                out.push_back(policy_to_string(p));
            return out;
        },
        py::arg("method"), "Partial-data policies applicable to a method");

    m.def(
        "knn_graph",
        [](const Eigen::MatrixXd& values, const std::string& orientation, int k) {
            SimilarityMatrix s;
            s.values = values;
            s.orientation = orientation_from_name(orientation);
            s.present.assign(static_cast<std::size_t>(values.rows()), 1);
            return knn_graph(s, k);
        },
        py::arg("values"), py::arg("orientation"), py::arg("k"),
        "Union-of-directions KNN graph from a square pairwise matrix");
    m.def(
        "knn_graph",
        [](const SimilarityMatrix& s, int k) { return knn_graph(s, k); }, py::arg("matrix"),
        py::arg("k"));
    m.def(
        "knn_graph",
        [](const FuseResult& r, int k) { return knn_graph(r.fused, k); }, py::arg("fused"),
        py::arg("k"));

    m.def(
        "modularity",
        [](const Graph& g, const std::vector<int>& labels, double gamma) {
            return modularity(g, to_labels(labels), gamma);
        },
        py::arg("graph"), py::arg("labels"), py::arg("gamma") = 1.0);
    m.def(
        "tpr",
        [](const Graph& g, const std::vector<int>& labels) { return tpr(g, to_labels(labels)); },
        py::arg("graph"), py::arg("labels"));
    m.def(
        "graph_stats",
        [](const Graph& g, const std::vector<int>& truth, double gamma) {
            return stats_dict(compute_stats(g, to_labels(truth), gamma));
        },
        py::arg("graph"), py::arg("truth"), py::arg("gamma") = 1.0,
        "Structure statistics of a network against reference labels");

    m.def(
        "leiden",
        [](const Graph& g, double gamma, std::uint64_t seed) {
            return leiden(g, gamma, seed).assignments;
        },
        py::arg("graph"), py::arg("gamma") = 1.0, py::arg("seed") = 0,
        "Leiden communities at a fixed resolution");
    m.def(
        "select_resolution",
        [](const Graph& g, std::uint64_t seed) {
            ClusterParams cp;
            cp.seed = seed;
            ResolutionResult r = select_resolution(g, cp);
            return py::make_tuple(r.gamma, r.labels.assignments);
        },
        py::arg("graph"), py::arg("seed") = 0,
        "Consensus resolution sweep; returns (gamma, labels)");
    m.def(
        "spectral",
        [](const Graph& g, int k, std::uint64_t seed) {
            ClusterParams cp;
            cp.seed = seed;
            return spectral_rw(g, k, cp).assignments;
        },
        py::arg("graph"), py::arg("k"), py::arg("seed") = 0,
        "Normalized spectral clustering into k groups");

    m.def(
        "ami",
        [](const std::vector<int>& a, const std::vector<int>& b) {
            return ami(to_labels(a), to_labels(b));
        },
        py::arg("a"), py::arg("b"), "Adjusted mutual information");
    m.def(
        "ari",
        [](const std::vector<int>& a, const std::vector<int>& b) {
            return ari(to_labels(a), to_labels(b));
        },
        py::arg("a"), py::arg("b"), "Adjusted Rand index");

    m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("dir"));
    m.def("load_dataset", &load_dataset, py::arg("dir"));

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            ExperimentConfig cfg = config_from_json_text(config_json);
            return static_cast<int>(run_experiment(cfg).size());
        },
        py::arg("config_json"),
        "Run a benchmark described by a JSON config; returns the record count");
}
