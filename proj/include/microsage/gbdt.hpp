#pragma once

#include <vector>

#include "microsage/matrix.hpp"

namespace microsage {

struct GbdtConfig {
  int rounds = 100;
  int max_depth = 4;
  double eta = 0.1;
  double lambda = 1.0;
  double min_child_weight = 1.0;
};

// Flat binary tree; leaves have feature == -1 and carry the weight.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  double weight = 0.0;
  int left = -1;
  int right = -1;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(const double* row) const;
};

// Gradient-boosted trees with softmax objective: one tree per class per
// round, fit to g = p - 1[y == c], h = p (1 - p), second-order leaf weights.
struct GbdtModel {
  GbdtConfig config;
  int n_classes = 0;
  int n_features = 0;
  std::vector<double> base_score;               // per class, log prior
  std::vector<std::vector<RegressionTree>> trees;  // [round][class]
};

GbdtModel gbdt_fit(const Matrix& features, const std::vector<int>& labels, int n_classes,
                   const GbdtConfig& config);

std::vector<double> gbdt_raw_scores(const GbdtModel& model, const double* row);

std::vector<int> gbdt_predict(const GbdtModel& model, const Matrix& queries);

}  // namespace microsage
