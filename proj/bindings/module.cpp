#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "microsage/common.hpp"
#include "microsage/dataset.hpp"
#include "microsage/features.hpp"
#include "microsage/gbdt.hpp"
#include "microsage/graph.hpp"
#include "microsage/knn.hpp"
#include "microsage/metrics.hpp"
#include "microsage/pca.hpp"
#include "microsage/pipeline.hpp"
#include "microsage/sage.hpp"
#include "microsage/synth.hpp"

namespace py = pybind11;
using namespace microsage;

namespace {

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows);
  for (int i = 0; i < m.rows; ++i) {
    rows[i].assign(m.row(i), m.row(i) + m.cols);
  }
  return rows;
}

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) {
      fail(Errc::ShapeMismatch, "ragged row lengths in matrix literal");
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i));
  }
  return m;
}

Dataset ingest_csv_files(const std::string& records_path, const std::string& phylo_path,
                         double epsilon) {
  std::ifstream records(records_path, std::ios::binary);
  if (!records) fail(Errc::IoFailure, "cannot read " + records_path);
  std::ifstream phylo(phylo_path, std::ios::binary);
  if (!phylo) fail(Errc::IoFailure, "cannot read " + phylo_path);
  return ingest_csv(records, phylo, epsilon);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Edge-graph interaction sign prediction: GraphSAGE core, baselines, "
            "synthetic worlds, metrics, and the staged pipeline.";

  py::register_exception<Error>(m, "PipelineError");

  py::class_<Matrix>(m, "Matrix")
      .def(py::init<int, int>(), py::arg("rows"), py::arg("cols"))
      .def_static("from_rows", &matrix_from_rows)
      .def_readonly("rows", &Matrix::rows)
      .def_readonly("cols", &Matrix::cols)
      .def("at", [](const Matrix& mat, int i, int j) { return mat.at(i, j); })
      .def("tolist", &matrix_rows);

  py::enum_<SignLabel>(m, "SignLabel")
      .value("Positive", SignLabel::Positive)
      .value("Negative", SignLabel::Negative);
  py::enum_<TwoWayLabel>(m, "TwoWayLabel")
      .value("Mutualism", TwoWayLabel::Mutualism)
      .value("Competition", TwoWayLabel::Competition)
      .value("Parasitism", TwoWayLabel::Parasitism);
  py::enum_<Task>(m, "Task").value("OneWay", Task::OneWay).value("TwoWay", Task::TwoWay);
  py::enum_<GraphMode>(m, "GraphMode")
      .value("Undirected", GraphMode::Undirected)
      .value("Directed", GraphMode::Directed);
  py::enum_<RecordOrientation>(m, "RecordOrientation")
      .value("XY", RecordOrientation::XY)
      .value("YX", RecordOrientation::YX);

  m.def("class_index", py::overload_cast<SignLabel>(&class_index));
  m.def("class_index", py::overload_cast<TwoWayLabel>(&class_index));
  m.def("label_one_way", &label_one_way, py::arg("mono_yield"), py::arg("co_yield"),
        py::arg("epsilon") = 0.0);
  m.def("derive_two_way", &derive_two_way);

  py::class_<CocultureRecord>(m, "CocultureRecord")
      .def(py::init<>())
      .def_readwrite("species_x", &CocultureRecord::species_x)
      .def_readwrite("species_y", &CocultureRecord::species_y)
      .def_readwrite("condition", &CocultureRecord::condition)
      .def_readwrite("mono_grow_x", &CocultureRecord::mono_grow_x)
      .def_readwrite("mono_grow_y", &CocultureRecord::mono_grow_y)
      .def_readwrite("mono_grow24_x", &CocultureRecord::mono_grow24_x)
      .def_readwrite("mono_grow24_y", &CocultureRecord::mono_grow24_y)
      .def_readwrite("co_yield_x", &CocultureRecord::co_yield_x)
      .def_readwrite("co_yield_y", &CocultureRecord::co_yield_y)
      .def_readwrite("label_xy", &CocultureRecord::label_xy)
      .def_readwrite("label_yx", &CocultureRecord::label_yx);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readonly("records", &Dataset::records)
      .def_readonly("species_count", &Dataset::species_count)
      .def_readonly("condition_count", &Dataset::condition_count)
      .def_readonly("mono_profile", &Dataset::mono_profile)
      .def_readonly("phylo_distance", &Dataset::phylo_distance)
      .def_readonly("species_names", &Dataset::species_names)
      .def_readonly("condition_names", &Dataset::condition_names);

  m.def("ingest_csv", &ingest_csv_files, py::arg("records_path"), py::arg("phylo_path"),
        py::arg("epsilon") = 0.0);

  py::class_<SplitMasks>(m, "SplitMasks")
      .def_readonly("train", &SplitMasks::train)
      .def_readonly("test", &SplitMasks::test)
      .def_readonly("train_count", &SplitMasks::train_count)
      .def_readonly("test_count", &SplitMasks::test_count);
  m.def("split_train_test", &split_train_test, py::arg("n"), py::arg("train_fraction"),
        py::arg("seed"));

  py::class_<WorldConfig>(m, "WorldConfig")
      .def(py::init<>())
      .def_readwrite("species_count", &WorldConfig::species_count)
      .def_readwrite("condition_count", &WorldConfig::condition_count)
      .def_readwrite("uptake_sparsity", &WorldConfig::uptake_sparsity)
      .def_readwrite("competition_strength", &WorldConfig::competition_strength)
      .def_readwrite("crossfeed_strength", &WorldConfig::crossfeed_strength)
      .def_readwrite("crossfeed_density", &WorldConfig::crossfeed_density)
      .def_readwrite("noise_sigma", &WorldConfig::noise_sigma)
      .def_readwrite("seed", &WorldConfig::seed);
  py::class_<World>(m, "World")
      .def_readonly("uptake", &World::uptake)
      .def_readonly("crossfeed", &World::crossfeed)
      .def_readonly("phylo_distance", &World::phylo_distance);
  m.def("generate_world", &generate_world);
  m.def("simulate_dataset", &simulate_dataset);
  m.def("two_way_distribution", &two_way_distribution);

  py::class_<FeatureContext>(m, "FeatureContext")
      .def_readonly("species_count", &FeatureContext::species_count)
      .def_readonly("condition_count", &FeatureContext::condition_count)
      .def_readonly("phylo_components", &FeatureContext::phylo_components)
      .def_readonly("carbon_components", &FeatureContext::carbon_components)
      .def_readonly("metabolic_distance", &FeatureContext::metabolic_distance);
  m.def("feature_names", [] { return feature_names(); });
  m.def("build_feature_context", &build_feature_context);
  m.def("assemble_features",
        [](const CocultureRecord& rec, RecordOrientation orientation, const FeatureContext& ctx) {
          const FeatureVector v = assemble_features(rec, orientation, ctx);
          return std::vector<double>(v.begin(), v.end());
        });
  m.def("metabolic_dissimilarity",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return metabolic_dissimilarity(a, b);
        });

  py::class_<InteractionGraph>(m, "InteractionGraph")
      .def_property_readonly("node_count",
                             [](const InteractionGraph& g) { return g.nodes.size(); })
      .def_property_readonly("edge_count",
                             [](const InteractionGraph& g) { return g.edges.size(); })
      .def_readonly("nodes", &InteractionGraph::nodes);
  m.def("build_interaction_graph", &build_interaction_graph);
  m.def("mode_for_task", &mode_for_task);

  py::class_<EdgeGraph>(m, "EdgeGraph")
      .def_readonly("task", &EdgeGraph::task)
      .def_readonly("mode", &EdgeGraph::mode)
      .def_readonly("node_count", &EdgeGraph::node_count)
      .def_readonly("n_classes", &EdgeGraph::n_classes)
      .def_readonly("features", &EdgeGraph::features)
      .def_readonly("labels", &EdgeGraph::labels)
      .def_readonly("record_index", &EdgeGraph::record_index)
      .def_readonly("csr_offsets", &EdgeGraph::csr_offsets)
      .def_readonly("csr_neighbors", &EdgeGraph::csr_neighbors)
      .def_readwrite("train_mask", &EdgeGraph::train_mask)
      .def_readwrite("test_mask", &EdgeGraph::test_mask)
      .def("degree", &EdgeGraph::degree)
      .def("neighbors", [](const EdgeGraph& g, int node) {
        const auto span = g.neighbors(node);
        return std::vector<int>(span.begin(), span.end());
      });
  m.def("to_edge_graph", &to_edge_graph, py::arg("graph"), py::arg("mode"), py::arg("context"),
        py::arg("task"), py::arg("dataset"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("hidden_dim", &TrainConfig::hidden_dim)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("train_fraction", &TrainConfig::train_fraction);
  py::class_<EpochStats>(m, "EpochStats")
      .def_readonly("train_loss", &EpochStats::train_loss)
      .def_readonly("train_accuracy", &EpochStats::train_accuracy)
      .def_readonly("test_accuracy", &EpochStats::test_accuracy);
  py::class_<GraphSageModel>(m, "GraphSageModel")
      .def_property_readonly("input_dim", &GraphSageModel::input_dim)
      .def_property_readonly("hidden_dim", &GraphSageModel::hidden_dim)
      .def_property_readonly("n_classes", &GraphSageModel::n_classes);
  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def_readonly("history", &TrainResult::history);
  m.def("train", &train, py::arg("graph"), py::arg("config"));
  m.def("predict_labels", [](const GraphSageModel& model, const EdgeGraph& graph) {
    return predict(model_forward(model, graph));
  });
  m.def("masked_accuracy", &masked_accuracy);

  py::class_<KnnModel>(m, "KnnModel")
      .def_readonly("k", &KnnModel::k)
      .def_readonly("n_classes", &KnnModel::n_classes);
  m.def("knn_fit", &knn_fit, py::arg("features"), py::arg("labels"), py::arg("k"),
        py::arg("n_classes"));
  m.def("knn_predict", &knn_predict);

  py::class_<GbdtConfig>(m, "GbdtConfig")
      .def(py::init<>())
      .def_readwrite("rounds", &GbdtConfig::rounds)
      .def_readwrite("max_depth", &GbdtConfig::max_depth)
      .def_readwrite("eta", &GbdtConfig::eta)
      .def_readwrite("lambda_", &GbdtConfig::lambda)
      .def_readwrite("min_child_weight", &GbdtConfig::min_child_weight);
  py::class_<GbdtModel>(m, "GbdtModel")
      .def_readonly("n_classes", &GbdtModel::n_classes)
      .def_readonly("base_score", &GbdtModel::base_score);
  m.def("gbdt_fit", &gbdt_fit, py::arg("features"), py::arg("labels"), py::arg("n_classes"),
        py::arg("config") = GbdtConfig{});
  m.def("gbdt_predict", &gbdt_predict);

  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def(py::init<int>())
      .def_readonly("n_classes", &ConfusionMatrix::n_classes)
      .def("at", [](const ConfusionMatrix& cm, int t, int p) { return cm.at(t, p); })
      .def("set", [](ConfusionMatrix& cm, int t, int p, std::int64_t v) { cm.at(t, p) = v; })
      .def("total", &ConfusionMatrix::total)
      .def("tolist", [](const ConfusionMatrix& cm) {
        std::vector<std::vector<std::int64_t>> rows(cm.n_classes);
        for (int t = 0; t < cm.n_classes; ++t) {
          for (int p = 0; p < cm.n_classes; ++p) rows[t].push_back(cm.at(t, p));
        }
        return rows;
      });
  py::class_<ClassMetrics>(m, "ClassMetrics")
      .def_readonly("precision", &ClassMetrics::precision)
      .def_readonly("recall", &ClassMetrics::recall)
      .def_readonly("f1", &ClassMetrics::f1)
      .def_readonly("support", &ClassMetrics::support);
  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("accuracy", &MetricsReport::accuracy)
      .def_readonly("macro_f1", &MetricsReport::macro_f1)
      .def_readonly("per_class", &MetricsReport::per_class);
  m.def("confusion_matrix", &confusion_matrix, py::arg("predictions"), py::arg("truths"),
        py::arg("n_classes"));
  m.def("metrics_from_confusion", &metrics_from_confusion, py::arg("cm"),
        py::arg("positive_class") = std::nullopt);
  m.def("f1_score", &f1_score);

  py::class_<PcaModel>(m, "PcaModel")
      .def_readonly("mean", &PcaModel::mean)
      .def_readonly("components", &PcaModel::components)
      .def_readonly("explained_variance_ratio", &PcaModel::explained_variance_ratio);
  m.def("pca_fit", &pca_fit, py::arg("data"), py::arg("variance_threshold"));
  m.def("pca_project", [](const PcaModel& model, const std::vector<double>& row) {
    return pca_project(model, row);
  });

  m.def(
      "run_pipeline",
      [](const std::string& config_json, const std::string& stage) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::exception& e) {
          fail(Errc::ConfigParse, std::string("config is not valid JSON: ") + e.what());
        }
        run_pipeline(config_from_json(doc), parse_stage(stage));
      },
      py::arg("config_json"), py::arg("stage"));
}
