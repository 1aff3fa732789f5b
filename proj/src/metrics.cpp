#include "microsage/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "microsage/common.hpp"

namespace microsage {

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t sum = 0;
  for (int c = 0; c < n_classes; ++c) sum += at(c, c);
  return sum;
}

std::int64_t ConfusionMatrix::row_sum(int truth) const {
  std::int64_t sum = 0;
  for (int p = 0; p < n_classes; ++p) sum += at(truth, p);
  return sum;
}

std::int64_t ConfusionMatrix::col_sum(int pred) const {
  std::int64_t sum = 0;
  for (int t = 0; t < n_classes; ++t) sum += at(t, pred);
  return sum;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions,
                                 const std::vector<int>& truths, int n_classes) {
  if (predictions.size() != truths.size()) {
    fail(Errc::ShapeMismatch, "confusion_matrix: predictions/truths length mismatch");
  }
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int t = truths[i];
    const int p = predictions[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) {
      fail(Errc::LabelOutOfRange, "confusion_matrix: label outside [0, " +
                                      std::to_string(n_classes) + ") at row " + std::to_string(i));
    }
    cm.at(t, p) += 1;
  }
  return cm;
}

const ClassMetrics& MetricsReport::positive() const {
  return per_class.at(static_cast<std::size_t>(positive_class.value_or(0)));
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  if (denom <= 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

namespace {

double safe_ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport metrics_from_confusion(const ConfusionMatrix& cm,
                                     std::optional<int> positive_class) {
  const std::int64_t total = cm.total();
  if (cm.n_classes == 0 || total == 0) {
    fail(Errc::EmptyMatrix, "metrics_from_confusion: confusion matrix has no instances");
  }
  if (positive_class && (*positive_class < 0 || *positive_class >= cm.n_classes)) {
    fail(Errc::LabelOutOfRange, "metrics_from_confusion: positive class out of range");
  }

  MetricsReport report;
  report.positive_class = positive_class;
  report.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  report.per_class.resize(cm.n_classes);
  double f1_sum = 0.0;
  for (int c = 0; c < cm.n_classes; ++c) {
    const std::int64_t tp = cm.at(c, c);
    const std::int64_t fp = cm.col_sum(c) - tp;
    const std::int64_t fn = cm.row_sum(c) - tp;
    ClassMetrics& m = report.per_class[c];
    m.support = cm.row_sum(c);
    m.precision = safe_ratio(tp, tp + fp);
    m.recall = safe_ratio(tp, tp + fn);
    m.f1 = f1_score(m.precision, m.recall);
    f1_sum += m.f1;
  }
  report.macro_f1 = f1_sum / static_cast<double>(cm.n_classes);
  return report;
}

namespace {

double round6(double x) { return std::round(x * 1e6) / 1e6; }

std::string fixed6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::string class_label(const ModelReport& report, int c) {
  if (c < static_cast<int>(report.class_names.size())) return report.class_names[c];
  return "class_" + std::to_string(c);
}

}  // namespace

void emit_report(const std::vector<ModelReport>& reports, const std::string& run_id,
                 std::uint64_t seed, const nlohmann::json& config_echo,
                 const std::filesystem::path& json_path, const std::filesystem::path& csv_path) {
  if (reports.empty()) fail(Errc::EmptyMatrix, "emit_report: no model reports supplied");

  nlohmann::json doc;
  doc["run_id"] = run_id;
  doc["seed"] = seed;
  doc["config_echo"] = config_echo;
  nlohmann::json models = nlohmann::json::array();
  for (const ModelReport& r : reports) {
    nlohmann::json entry;
    entry["name"] = r.name;
    entry["task"] = r.task;
    entry["accuracy"] = round6(r.metrics.accuracy);
    entry["macro_f1"] = round6(r.metrics.macro_f1);
    nlohmann::json confusion = nlohmann::json::array();
    for (int t = 0; t < r.confusion.n_classes; ++t) {
      nlohmann::json row = nlohmann::json::array();
      for (int p = 0; p < r.confusion.n_classes; ++p) row.push_back(r.confusion.at(t, p));
      confusion.push_back(std::move(row));
    }
    entry["confusion"] = std::move(confusion);
    nlohmann::json per_class = nlohmann::json::array();
    for (int c = 0; c < static_cast<int>(r.metrics.per_class.size()); ++c) {
      const ClassMetrics& m = r.metrics.per_class[c];
      nlohmann::json cls;
      cls["class"] = class_label(r, c);
      cls["precision"] = round6(m.precision);
      cls["recall"] = round6(m.recall);
      cls["f1"] = round6(m.f1);
      cls["support"] = m.support;
      per_class.push_back(std::move(cls));
    }
    entry["per_class"] = std::move(per_class);
    models.push_back(std::move(entry));
  }
  doc["models"] = std::move(models);

  {
    std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoFailure, "cannot open " + json_path.string());
    out << doc.dump(2) << '\n';
    if (!out) fail(Errc::IoFailure, "write failed for " + json_path.string());
  }
  {
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoFailure, "cannot open " + csv_path.string());
    out << "# run_id=" << run_id << '\n';
    out << "# seed=" << seed << '\n';
    out << "# config=" << config_echo.dump() << '\n';
    out << "model,task,class,support,precision,recall,f1,accuracy,macro_f1\n";
    for (const ModelReport& r : reports) {
      for (int c = 0; c < static_cast<int>(r.metrics.per_class.size()); ++c) {
        const ClassMetrics& m = r.metrics.per_class[c];
        out << r.name << ',' << r.task << ',' << class_label(r, c) << ',' << m.support << ','
            << fixed6(m.precision) << ',' << fixed6(m.recall) << ',' << fixed6(m.f1) << ','
            << fixed6(r.metrics.accuracy) << ',' << fixed6(r.metrics.macro_f1) << '\n';
      }
    }
    if (!out) fail(Errc::IoFailure, "write failed for " + csv_path.string());
  }
}

}  // namespace microsage
