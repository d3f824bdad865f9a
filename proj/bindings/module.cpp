#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "disenlink/checkpoint.hpp"
#include "disenlink/datagen.hpp"
#include "disenlink/errors.hpp"
#include "disenlink/experiments.hpp"
#include "disenlink/graph.hpp"
#include "disenlink/heuristics.hpp"
#include "disenlink/metrics.hpp"
#include "disenlink/split.hpp"
#include "disenlink/trainer.hpp"

namespace py = pybind11;
using namespace disenlink;

namespace {

py::array_t<double> tensor_to_array(const Tensor& t) {
  std::vector<ssize_t> shape(t.shape.begin(), t.shape.end());
  py::array_t<double> arr(shape);
  std::copy(t.data.begin(), t.data.end(), arr.mutable_data());
  return arr;
}

Tensor array_to_tensor(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  Tensor t;
  t.shape.assign(arr.shape(), arr.shape() + arr.ndim());
  t.data.assign(arr.data(), arr.data() + arr.size());
  return t;
}

Hyperparams hp_from_kwargs(const py::kwargs& kwargs) {
  Hyperparams hp;
  for (auto item : kwargs) {
    const std::string key = py::str(item.first);
    if (key == "factors") hp.factors = item.second.cast<int>();
    else if (key == "embed_dim" || key == "dim") hp.embed_dim = item.second.cast<int>();
    else if (key == "hidden") hp.hidden = item.second.cast<int>();
    else if (key == "tau") hp.tau = item.second.cast<double>();
    else if (key == "beta") hp.beta = item.second.cast<double>();
    else if (key == "train_negatives" || key == "neg_m") hp.train_negatives = item.second.cast<int>();
    else if (key == "lr") hp.lr = item.second.cast<double>();
    else if (key == "weight_decay") hp.weight_decay = item.second.cast<double>();
    else if (key == "max_epochs" || key == "epochs") hp.max_epochs = item.second.cast<int>();
    else if (key == "eval_every") hp.eval_every = item.second.cast<int>();
    else if (key == "patience") hp.patience = item.second.cast<int>();
    else if (key == "seed") hp.seed = item.second.cast<uint64_t>();
    else if (key == "variant") hp.variant = parse_variant(item.second.cast<std::string>());
    else if (key == "normalize_features") hp.normalize_features = item.second.cast<bool>();
    else if (key == "use_bias") hp.use_bias = item.second.cast<bool>();
    else fail("invalid_config", "unknown hyperparameter \"" + key + "\"");
  }
  return hp;
}

py::dict report_to_dict(const MetricsReport& r) {
  py::dict d;
  d["dataset"] = r.dataset;
  d["method"] = r.method;
  d["variant"] = r.variant;
  d["seed"] = r.seed;
  d["K"] = r.factors;
  d["d"] = r.embed_dim;
  d["tau"] = r.tau;
  d["beta"] = r.beta;
  d["M"] = r.train_negatives;
  d["auc"] = r.auc;
  d["split"] = r.split;
  d["wall_ms"] = r.wall_ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Disentangled link prediction for heterophilic graphs";

  py::register_exception<Error>(m, "DisenlinkError");

  py::class_<AttributedGraph>(m, "Graph")
      .def_readonly("num_nodes", &AttributedGraph::num_nodes)
      .def_property_readonly("num_edges", &AttributedGraph::num_edges)
      .def_property_readonly("feature_dim", &AttributedGraph::feature_dim)
      .def_property_readonly("has_labels", &AttributedGraph::has_labels)
      .def_property_readonly("edges", [](const AttributedGraph& g) { return g.edges; })
      .def_property_readonly("labels", [](const AttributedGraph& g) { return g.labels; })
      .def_property_readonly("features",
                             [](const AttributedGraph& g) { return tensor_to_array(g.features); })
      .def("degree", &AttributedGraph::degree)
      .def("has_edge", &AttributedGraph::has_edge);

  py::class_<EdgeSplit>(m, "EdgeSplit")
      .def_readonly("train_pos", &EdgeSplit::train_pos)
      .def_readonly("valid_pos", &EdgeSplit::valid_pos)
      .def_readonly("test_pos", &EdgeSplit::test_pos)
      .def_readonly("valid_neg", &EdgeSplit::valid_neg)
      .def_readonly("test_neg", &EdgeSplit::test_neg)
      .def_readonly("seed", &EdgeSplit::seed);

  py::class_<ModelState>(m, "ModelState")
      .def_property_readonly("factors", [](const ModelState& s) { return s.hp.factors; })
      .def_property_readonly("embed_dim", [](const ModelState& s) { return s.hp.embed_dim; })
      .def_property_readonly("seed", [](const ModelState& s) { return s.hp.seed; });

  py::class_<EpochTrace>(m, "EpochTrace")
      .def_readonly("epoch", &EpochTrace::epoch)
      .def_readonly("train_loss", &EpochTrace::train_loss)
      .def_readonly("valid_auc", &EpochTrace::valid_auc)
      .def_readonly("elapsed_ms", &EpochTrace::elapsed_ms);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("state", &TrainResult::state)
      .def_readonly("trace", &TrainResult::trace)
      .def_readonly("best_valid_auc", &TrainResult::best_valid_auc)
      .def_readonly("best_epoch", &TrainResult::best_epoch)
      .def_readonly("epochs_run", &TrainResult::epochs_run)
      .def_readonly("stop_reason", &TrainResult::stop_reason);

  m.def("load_graph_dir",
        [](const std::string& dir) { return load_graph_dir(dir); },
        py::arg("dataset_dir"), "Load edges.txt / features.txt / labels.txt from a directory");
  m.def("load_graph",
        [](const std::string& edges, const std::string& features, const std::string& labels) {
          return load_graph(edges, features, labels);
        },
        py::arg("edges_path"), py::arg("features_path"), py::arg("labels_path") = "");
  m.def("edge_homophily", &edge_homophily, py::arg("graph"),
        "Fraction of edges joining same-label endpoints");

  m.def("split_edges",
        [](const AttributedGraph& g, std::array<double, 3> ratios, int neg_multiplier,
           uint64_t seed) { return split_edges(g, ratios, neg_multiplier, seed); },
        py::arg("graph"), py::arg("ratios") = std::array<double, 3>{0.85, 0.05, 0.10},
        py::arg("neg_multiplier") = 5, py::arg("seed") = 1);
  m.def("save_split", &save_split, py::arg("split"), py::arg("path"));
  m.def("load_split", &load_split, py::arg("path"));

  m.def("train",
        [](const AttributedGraph& g, const EdgeSplit& split, const py::kwargs& kwargs) {
          return train(g, split, hp_from_kwargs(kwargs));
        },
        py::arg("graph"), py::arg("split"),
        "Train on the split's training edges; hyperparameters as keyword arguments");

  m.def("evaluate",
        [](const AttributedGraph& g, const EdgeSplit& split, const ModelState& state,
           const std::string& which) {
          return report_to_dict(evaluate_model(
              g, split, state, which == "valid" ? SplitPart::valid : SplitPart::test));
        },
        py::arg("graph"), py::arg("split"), py::arg("state"), py::arg("which") = "test");

  m.def("evaluate_baseline",
        [](const AttributedGraph& g, const EdgeSplit& split, const std::string& method,
           const std::string& which) {
          const AttributedGraph train_graph = with_edges(g, split.train_pos);
          ScoreFn scorer;
          if (method == "cn") {
            scorer = [&train_graph](int32_t u, int32_t v) {
              return static_cast<double>(common_neighbors(train_graph, u, v));
            };
          } else if (method == "aa") {
            scorer = [&train_graph](int32_t u, int32_t v) {
              return adamic_adar(train_graph, u, v);
            };
          } else {
            fail("invalid_config", "method must be cn or aa");
          }
          MetricsReport r = evaluate_scorer(
              scorer, split, which == "valid" ? SplitPart::valid : SplitPart::test);
          r.method = method;
          return report_to_dict(r);
        },
        py::arg("graph"), py::arg("split"), py::arg("method"), py::arg("which") = "test");

  m.def("predict_link",
        [](const AttributedGraph& g, const EdgeSplit& split, const ModelState& state, int32_t s,
           int32_t t) {
          DirectedAdj adj = DirectedAdj::from_undirected(split.train_pos, g.num_nodes);
          return predict_link(g, adj, state, s, t);
        },
        py::arg("graph"), py::arg("split"), py::arg("state"), py::arg("s"), py::arg("t"));

  m.def("auc", &auc_score, py::arg("pos_scores"), py::arg("neg_scores"),
        "Rank-based AUC with half credit for ties");
  m.def("common_neighbors", &common_neighbors, py::arg("graph"), py::arg("u"), py::arg("v"));
  m.def("adamic_adar", &adamic_adar, py::arg("graph"), py::arg("u"), py::arg("v"));

  m.def("compute_embeddings",
        [](const AttributedGraph& g, const EdgeSplit& split, const ModelState& state) {
          DirectedAdj adj = DirectedAdj::from_undirected(split.train_pos, g.num_nodes);
          FactorEmbeddings emb = compute_embeddings(g, adj, state);
          return py::make_tuple(tensor_to_array(emb.z), tensor_to_array(emb.h));
        },
        py::arg("graph"), py::arg("split"), py::arg("state"),
        "Pre- and post-aggregation embeddings, each num_nodes x (K*d)");

  m.def("correlation_matrix",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& emb) {
          return tensor_to_array(correlation_matrix(array_to_tensor(emb)));
        },
        py::arg("embeddings"), "Absolute Pearson correlations between embedding columns");

  m.def("save_checkpoint", &save_checkpoint, py::arg("state"), py::arg("path"));
  m.def("load_checkpoint", &load_checkpoint, py::arg("path"));

  m.def("dataset_presets", &dataset_preset_names);
  m.def("generate_dataset",
        [](const std::string& preset, const std::string& out_dir) {
          AttributedGraph g = synthesize_dataset(dataset_preset(preset));
          write_dataset(g, out_dir);
          return g;
        },
        py::arg("preset"), py::arg("out_dir"),
        "Synthesize a benchmark preset and write it as a dataset directory");

  m.attr("__version__") = "0.1.0";
}
