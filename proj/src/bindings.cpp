#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <vector>

#include "crowdrank/baselines.hpp"
#include "crowdrank/core.hpp"
#include "crowdrank/crowd.hpp"
#include "crowdrank/datasets.hpp"
#include "crowdrank/eval.hpp"
#include "crowdrank/serialize.hpp"
#include "crowdrank/vrjam.hpp"

namespace py = pybind11;
using namespace crowdrank;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows[0].empty()) {
    throw InvalidInput("matrix rows must be nonempty");
  }
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw InvalidInput("matrix rows differ in length");
    }
    for (std::size_t c = 0; c < rows[0].size(); ++c) {
      m[r][c] = rows[r][c];
    }
  }
  return m;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows[r].assign(m[r], m[r] + m.cols());
  }
  return rows;
}

std::vector<int> bits_to_ints(const LabelColumn& column) {
  return std::vector<int>(column.bits.begin(), column.bits.end());
}

LabelColumn bits_from_ints(const std::vector<int>& bits) {
  LabelColumn column;
  column.bits.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) {
      throw InvalidInput("label bits must be 0 or 1");
    }
    column.bits.push_back(static_cast<std::uint8_t>(b));
  }
  return column;
}

}  // namespace

PYBIND11_MODULE(_crowdrank, m) {
  m.doc() = "Latent ranking inference from noisy pairwise annotations";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IncompleteAnnotation>(m, "IncompleteAnnotation",
                                               PyExc_ValueError);

  py::class_<Matrix>(m, "Matrix")
      .def(py::init(&matrix_from_rows), py::arg("rows"))
      .def_property_readonly("shape",
                             [](const Matrix& mat) {
                               return py::make_tuple(mat.rows(), mat.cols());
                             })
      .def("tolist", &matrix_to_rows);

  py::class_<ItemTable>(m, "ItemTable")
      .def(py::init([](const std::vector<std::string>& ids,
                       const std::vector<std::vector<double>>& attrs) {
             return make_item_table(std::vector<std::string>(ids),
                                    matrix_from_rows(attrs));
           }),
           py::arg("ids"), py::arg("attrs"))
      .def_readonly("ids", &ItemTable::ids)
      .def_property_readonly(
          "attrs", [](const ItemTable& t) { return matrix_to_rows(t.attrs); })
      .def("__len__", &ItemTable::size)
      .def_property_readonly("dim", &ItemTable::dim);

  py::class_<Pair>(m, "Pair")
      .def_readonly("i", &Pair::i)
      .def_readonly("j", &Pair::j);

  py::class_<PairIndex>(m, "PairIndex")
      .def("__len__",
           [](const PairIndex& p) { return p.pairs.size(); })
      .def_property_readonly("pairs", [](const PairIndex& p) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        out.reserve(p.pairs.size());
        for (const Pair& pr : p.pairs) {
          out.emplace_back(pr.i, pr.j);
        }
        return out;
      });

  py::class_<LabelColumn>(m, "LabelColumn")
      .def(py::init(&bits_from_ints), py::arg("bits"))
      .def_property_readonly("bits", &bits_to_ints)
      .def("__len__", [](const LabelColumn& c) { return c.bits.size(); });

  py::class_<AnnotationSet>(m, "AnnotationSet")
      .def_readonly("annotator_ids", &AnnotationSet::annotator_ids)
      .def_readonly("pairs", &AnnotationSet::pairs)
      .def_property_readonly("columns",
                             [](const AnnotationSet& a) {
                               std::vector<std::vector<int>> out;
                               out.reserve(a.columns.size());
                               for (const auto& col : a.columns) {
                                 out.push_back(
                                     bits_to_ints(col));
                               }
                               return out;
                             })
      .def_property_readonly("num_annotators", &AnnotationSet::num_annotators)
      .def_property_readonly("num_pairs", &AnnotationSet::num_pairs);

  py::class_<StandardizeResult>(m, "StandardizeResult")
      .def_readonly("items", &StandardizeResult::items)
      .def_readonly("mean", &StandardizeResult::mean)
      .def_readonly("scale", &StandardizeResult::scale)
      .def_property_readonly("constant_dims", [](const StandardizeResult& r) {
        return std::vector<int>(r.constant_dims.begin(), r.constant_dims.end());
      });

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("max_iterations", &TrainConfig::max_iterations)
      .def_readwrite("cost_tolerance", &TrainConfig::cost_tolerance)
      .def_readwrite("l2_penalty", &TrainConfig::l2_penalty)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<RankerWeights>(m, "RankerWeights")
      .def(py::init<>())
      .def_readwrite("w", &RankerWeights::w)
      .def_readonly("trained_iterations", &RankerWeights::trained_iterations)
      .def_readonly("final_cost", &RankerWeights::final_cost)
      .def_readonly("step_search_failed", &RankerWeights::step_search_failed)
      .def("to_json",
           [](const RankerWeights& w) { return to_json_string(w); });

  py::class_<EmConfig>(m, "EmConfig")
      .def(py::init<>())
      .def_readwrite("train", &EmConfig::train)
      .def_readwrite("max_em_iterations", &EmConfig::max_em_iterations)
      .def_readwrite("param_tolerance", &EmConfig::param_tolerance)
      .def_readwrite("clusters", &EmConfig::clusters)
      .def_readwrite("cluster_threshold_ratio", &EmConfig::cluster_threshold_ratio)
      .def_readwrite("max_clusters", &EmConfig::max_clusters);

  py::class_<EmIterationRecord>(m, "EmIterationRecord")
      .def_readonly("log_likelihood", &EmIterationRecord::log_likelihood)
      .def_readonly("surrogate", &EmIterationRecord::surrogate)
      .def_readonly("entropy", &EmIterationRecord::entropy)
      .def_readonly("param_delta", &EmIterationRecord::param_delta);

  py::class_<EmDiagnostics>(m, "EmDiagnostics")
      .def_readonly("records", &EmDiagnostics::records)
      .def_readonly("likelihood_drop_warning",
                    &EmDiagnostics::likelihood_drop_warning);

  py::class_<PosteriorTable>(m, "PosteriorTable")
      .def_readonly("q1", &PosteriorTable::q1);

  py::class_<IamModel>(m, "IamModel")
      .def_readonly("annotator_ids", &IamModel::annotator_ids)
      .def_readonly("rankers", &IamModel::rankers)
      .def("to_json", [](const IamModel& mod) { return to_json_string(mod); });

  py::class_<JamModel>(m, "JamModel")
      .def_readonly("w", &JamModel::w)
      .def_readonly("r", &JamModel::r)
      .def_readonly("iterations", &JamModel::iterations)
      .def_readonly("converged", &JamModel::converged)
      .def_readonly("seed", &JamModel::seed)
      .def_readonly("diagnostics", &JamModel::diagnostics)
      .def("to_json", [](const JamModel& mod) { return to_json_string(mod); });

  py::class_<ClusterModel>(m, "ClusterModel")
      .def(py::init([](const std::vector<std::vector<double>>& centroids) {
             ClusterModel c;
             c.centroids = matrix_from_rows(centroids);
             return c;
           }),
           py::arg("centroids"))
      .def_property_readonly(
          "centroids",
          [](const ClusterModel& c) { return matrix_to_rows(c.centroids); })
      .def_readonly("threshold_used", &ClusterModel::threshold_used)
      .def_property_readonly("num_clusters", &ClusterModel::num_clusters);

  py::class_<VrjamModel>(m, "VrjamModel")
      .def_readonly("w", &VrjamModel::w)
      .def_property_readonly(
          "reliability",
          [](const VrjamModel& mod) { return matrix_to_rows(mod.reliability); })
      .def_readonly("clusters", &VrjamModel::clusters)
      .def_readonly("iterations", &VrjamModel::iterations)
      .def_readonly("converged", &VrjamModel::converged)
      .def_readonly("seed", &VrjamModel::seed)
      .def_readonly("diagnostics", &VrjamModel::diagnostics)
      .def("to_json",
           [](const VrjamModel& mod) { return to_json_string(mod); });

  py::enum_<CrowdMode>(m, "CrowdMode")
      .value("UNIFORM", CrowdMode::kUniform)
      .value("REGION", CrowdMode::kRegion);

  py::class_<CrowdSpec>(m, "CrowdSpec")
      .def(py::init<>())
      .def_readwrite("mode", &CrowdSpec::mode)
      .def_readwrite("b", &CrowdSpec::b)
      .def_property(
          "B", [](const CrowdSpec& s) { return matrix_to_rows(s.B); },
          [](CrowdSpec& s, const std::vector<std::vector<double>>& rows) {
            s.B = matrix_from_rows(rows);
          })
      .def_readwrite("regions", &CrowdSpec::regions)
      .def_readwrite("alpha", &CrowdSpec::alpha)
      .def_readwrite("seed", &CrowdSpec::seed);

  py::class_<WineTable>(m, "WineTable")
      .def_readonly("items", &WineTable::items)
      .def_readonly("quality", &WineTable::quality)
      .def_readonly("feature_names", &WineTable::feature_names);

  py::class_<McNemarResult>(m, "McNemarResult")
      .def_readonly("statistic", &McNemarResult::statistic)
      .def_readonly("significant_at_5pct", &McNemarResult::significant_at_5pct);

  py::class_<SweepCell>(m, "SweepCell")
      .def_readonly("param", &SweepCell::param)
      .def_readonly("method", &SweepCell::method)
      .def_readonly("rep", &SweepCell::rep)
      .def_readonly("accuracy", &SweepCell::accuracy);

  py::class_<SweepSummaryRow>(m, "SweepSummaryRow")
      .def_readonly("param", &SweepSummaryRow::param)
      .def_readonly("method", &SweepSummaryRow::method)
      .def_readonly("reps", &SweepSummaryRow::reps)
      .def_readonly("mean", &SweepSummaryRow::mean)
      .def_readonly("stddev", &SweepSummaryRow::stddev);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("grid", &SweepResult::grid)
      .def_readonly("summary", &SweepResult::summary);

  py::class_<SweepConfig>(m, "SweepConfig")
      .def(py::init<>())
      .def_readwrite("em", &SweepConfig::em)
      .def_readwrite("reps", &SweepConfig::reps)
      .def_readwrite("standardize", &SweepConfig::standardize);

  py::class_<LossGridRow>(m, "LossGridRow")
      .def_readonly("input", &LossGridRow::input)
      .def_readonly("neg_hinge", &LossGridRow::neg_hinge)
      .def_readonly("log_logistic", &LossGridRow::log_logistic);

  py::class_<LossGrid>(m, "LossGrid")
      .def_readonly("rows", &LossGrid::rows)
      .def_readonly("max_abs_diff", &LossGrid::max_abs_diff);

  m.def("build_pair_index",
        [](const ItemTable& items, const std::optional<std::vector<double>>& scores) {
          return build_pair_index(items, scores ? &*scores : nullptr);
        },
        py::arg("items"), py::arg("scores") = py::none());
  m.def("ground_truth_labels", &ground_truth_labels, py::arg("pairs"),
        py::arg("scores"));
  m.def("pair_differences", &pair_differences, py::arg("items"),
        py::arg("pairs"));
  m.def("standardize_features", &standardize_features, py::arg("items"));

  m.def("smooth_hinge",
        [](double margin) {
          HingeValue h = smooth_hinge(margin);
          return py::make_tuple(h.loss, h.derivative);
        },
        py::arg("margin"));
  m.def("train_ranker",
        [](const Matrix& diffs, const std::vector<double>& weight_pos,
           const std::vector<double>& weight_neg, const TrainConfig& config,
           const std::optional<RankerWeights>& init) {
          return train_ranker(diffs, weight_pos, weight_neg, config,
                              init ? &*init : nullptr);
        },
        py::arg("diffs"), py::arg("weight_pos"), py::arg("weight_neg"),
        py::arg("config") = TrainConfig{}, py::arg("init") = py::none());
  m.def("score",
        [](const RankerWeights& weights, const std::vector<double>& x) {
          return score(weights, x);
        },
        py::arg("weights"), py::arg("x"));

  m.def("majority_vote", &majority_vote, py::arg("annotations"),
        py::arg("seed"));
  m.def("iam_train", &iam_train, py::arg("annotations"), py::arg("items"),
        py::arg("config") = TrainConfig{});
  m.def("iam_fuse", &iam_fuse, py::arg("model"), py::arg("items"),
        py::arg("pairs"));

  m.def("jam_e_step", &jam_e_step, py::arg("w"), py::arg("r"),
        py::arg("annotations"), py::arg("diffs"));
  m.def("jam_fit", &jam_fit, py::arg("annotations"), py::arg("items"),
        py::arg("config") = EmConfig{}, py::arg("seed") = 0);
  m.def("jam_infer", &jam_infer, py::arg("model"), py::arg("annotations"),
        py::arg("diffs"));

  m.def("kmeans_fit", &kmeans_fit, py::arg("points"), py::arg("num_clusters"),
        py::arg("seed"), py::arg("max_iter") = 100);
  m.def("select_num_clusters", &select_num_clusters, py::arg("points"),
        py::arg("threshold_ratio"), py::arg("max_clusters"), py::arg("seed"));
  m.def("vrjam_fit", &vrjam_fit, py::arg("annotations"), py::arg("items"),
        py::arg("config") = EmConfig{}, py::arg("seed") = 0);
  m.def("vrjam_infer", &vrjam_infer, py::arg("model"), py::arg("annotations"),
        py::arg("diffs"));

  m.def("generate_crowd", &generate_crowd, py::arg("truth"), py::arg("spec"),
        py::arg("pairs"), py::arg("diffs"));

  m.def("pairwise_accuracy", &pairwise_accuracy, py::arg("pred"),
        py::arg("truth"));
  m.def("mcnemar_test", &mcnemar_test, py::arg("pred_a"), py::arg("pred_b"),
        py::arg("truth"));
  m.def("run_noise_sweep", &run_noise_sweep, py::arg("items"),
        py::arg("quality"), py::arg("base_b"), py::arg("alpha_grid"),
        py::arg("config") = SweepConfig{}, py::arg("seed") = 0);
  m.def("run_annotator_sweep", &run_annotator_sweep, py::arg("items"),
        py::arg("quality"), py::arg("k_grid"), py::arg("config") = SweepConfig{},
        py::arg("seed") = 0);
  m.def("loss_comparison_grid", &loss_comparison_grid, py::arg("min_input"),
        py::arg("max_input"), py::arg("step"));

  m.def("load_items_csv", &load_items_csv, py::arg("path"));
  m.def("save_items_csv", &save_items_csv, py::arg("path"), py::arg("items"));
  m.def("load_wine_csv", &load_wine_csv, py::arg("path"),
        py::arg("score_column") = "quality");
  m.def("save_wine_csv", &save_wine_csv, py::arg("path"), py::arg("wine"),
        py::arg("score_column") = "quality");
  m.def("load_annotations_csv", &load_annotations_csv, py::arg("path"),
        py::arg("items"));
  m.def("save_annotations_csv", &save_annotations_csv, py::arg("path"),
        py::arg("annotations"), py::arg("items"));
  m.def("save_labels_csv", &save_labels_csv, py::arg("path"), py::arg("labels"),
        py::arg("pairs"), py::arg("items"));
  m.def("load_labels_csv", &load_labels_csv, py::arg("path"), py::arg("items"),
        py::arg("expected_pairs"));
  m.def("load_scores_csv", &load_scores_csv, py::arg("path"), py::arg("items"));
  m.def("save_scores_csv", &save_scores_csv, py::arg("path"), py::arg("items"),
        py::arg("scores"));

  m.def("ranker_weights_from_json", &ranker_weights_from_json, py::arg("text"));
  m.def("jam_model_from_json", &jam_model_from_json, py::arg("text"));
  m.def("vrjam_model_from_json", &vrjam_model_from_json, py::arg("text"));
}
