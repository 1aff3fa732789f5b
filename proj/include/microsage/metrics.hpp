#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace microsage {

struct ConfusionMatrix {
  int n_classes = 0;
  std::vector<std::int64_t> counts;  // row-major, counts[truth][prediction]

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int c) : n_classes(c), counts(static_cast<std::size_t>(c) * c, 0) {}

  std::int64_t& at(int truth, int pred) {
    return counts[static_cast<std::size_t>(truth) * n_classes + pred];
  }
  std::int64_t at(int truth, int pred) const {
    return counts[static_cast<std::size_t>(truth) * n_classes + pred];
  }
  std::int64_t total() const;
  std::int64_t trace() const;
  std::int64_t row_sum(int truth) const;
  std::int64_t col_sum(int pred) const;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions,
                                 const std::vector<int>& truths, int n_classes);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  std::optional<int> positive_class;

  // Binary-mode accessors: metrics of the designated positive class.
  const ClassMetrics& positive() const;
};

// Harmonic mean of precision and recall; 0 whenever either is 0.
double f1_score(double precision, double recall);

MetricsReport metrics_from_confusion(const ConfusionMatrix& cm,
                                     std::optional<int> positive_class = std::nullopt);

struct ModelReport {
  std::string name;
  std::string task;
  MetricsReport metrics;
  ConfusionMatrix confusion;
  std::vector<std::string> class_names;  // optional; falls back to class_<i>
};

// Writes the combined report as JSON (sorted keys, floats rounded to 6
// decimals) and a flat CSV with one row per model/class. Byte-identical
// output for identical inputs.
void emit_report(const std::vector<ModelReport>& reports, const std::string& run_id,
                 std::uint64_t seed, const nlohmann::json& config_echo,
                 const std::filesystem::path& json_path, const std::filesystem::path& csv_path);

}  // namespace microsage
