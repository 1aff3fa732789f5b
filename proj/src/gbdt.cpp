#include "microsage/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "microsage/common.hpp"

namespace microsage {

double RegressionTree::predict(const double* row) const {
  int idx = 0;
  while (nodes[idx].feature >= 0) {
    idx = row[nodes[idx].feature] < nodes[idx].threshold ? nodes[idx].left : nodes[idx].right;
  }
  return nodes[idx].weight;
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct TreeBuilder {
  const Matrix& x;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  const GbdtConfig& cfg;
  std::vector<TreeNode> nodes;

  // Scratch: (feature value, sample index) pairs re-sorted per candidate feature.
  std::vector<std::pair<double, int>> order;

  double leaf_weight(double g_sum, double h_sum) const {
    return -g_sum / (h_sum + cfg.lambda);
  }

  double score(double g_sum, double h_sum) const {
    return g_sum * g_sum / (h_sum + cfg.lambda);
  }

  SplitChoice best_split(const std::vector<int>& rows, double g_total, double h_total) {
    SplitChoice best;
    const double parent = score(g_total, h_total);
    for (int f = 0; f < x.cols; ++f) {
      order.clear();
      for (int r : rows) order.emplace_back(x.at(r, f), r);
      std::sort(order.begin(), order.end());
      double g_left = 0.0;
      double h_left = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const int r = order[i].second;
        g_left += grad[r];
        h_left += hess[r];
        if (order[i].first == order[i + 1].first) continue;  // no boundary here
        const double h_right = h_total - h_left;
        if (h_left < cfg.min_child_weight || h_right < cfg.min_child_weight) continue;
        const double g_right = g_total - g_left;
        const double gain = 0.5 * (score(g_left, h_left) + score(g_right, h_right) - parent);
        if (gain > best.gain) {
          best.found = true;
          best.feature = f;
          best.threshold = 0.5 * (order[i].first + order[i + 1].first);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  int build(const std::vector<int>& rows, int depth) {
    double g_total = 0.0;
    double h_total = 0.0;
    for (int r : rows) {
      g_total += grad[r];
      h_total += hess[r];
    }
    const int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (depth < cfg.max_depth && rows.size() >= 2) {
      const SplitChoice split = best_split(rows, g_total, h_total);
      if (split.found) {
        std::vector<int> left_rows;
        std::vector<int> right_rows;
        for (int r : rows) {
          (x.at(r, split.feature) < split.threshold ? left_rows : right_rows).push_back(r);
        }
        nodes[idx].feature = split.feature;
        nodes[idx].threshold = split.threshold;
        const int left = build(left_rows, depth + 1);
        nodes[idx].left = left;
        const int right = build(right_rows, depth + 1);
        nodes[idx].right = right;
        return idx;
      }
    }
    nodes[idx].weight = cfg.eta * leaf_weight(g_total, h_total);
    return idx;
  }
};

void softmax_rows(const std::vector<double>& scores, int n, int k, std::vector<double>& probs) {
  for (int i = 0; i < n; ++i) {
    const double* row = scores.data() + static_cast<std::size_t>(i) * k;
    double* prow = probs.data() + static_cast<std::size_t>(i) * k;
    double row_max = row[0];
    for (int c = 1; c < k; ++c) row_max = std::max(row_max, row[c]);
    double denom = 0.0;
    for (int c = 0; c < k; ++c) {
      prow[c] = std::exp(row[c] - row_max);
      denom += prow[c];
    }
    for (int c = 0; c < k; ++c) prow[c] /= denom;
  }
}

}  // namespace

GbdtModel gbdt_fit(const Matrix& features, const std::vector<int>& labels, int n_classes,
                   const GbdtConfig& config) {
  if (config.rounds < 1 || config.max_depth < 1 || config.eta <= 0.0 || config.lambda < 0.0 ||
      config.min_child_weight < 0.0) {
    fail(Errc::InvalidConfig, "gbdt: invalid hyperparameters");
  }
  if (n_classes < 2) fail(Errc::InvalidConfig, "gbdt: need at least two classes");
  if (features.rows < 2) fail(Errc::DegenerateData, "gbdt: need at least two training rows");
  if (labels.size() != static_cast<std::size_t>(features.rows)) {
    fail(Errc::ShapeMismatch, "gbdt: labels length does not match feature rows");
  }

  const int n = features.rows;
  const int k = n_classes;
  GbdtModel model;
  model.config = config;
  model.n_classes = k;
  model.n_features = features.cols;
  model.base_score.assign(k, 0.0);

  std::vector<std::int64_t> counts(k, 0);
  for (int label : labels) {
    if (label < 0 || label >= k) {
      fail(Errc::LabelOutOfRange, "gbdt: label " + std::to_string(label) + " out of range");
    }
    counts[label] += 1;
  }
  int present = 0;
  for (int c = 0; c < k; ++c) {
    const double prior = static_cast<double>(counts[c]) / static_cast<double>(n);
    model.base_score[c] = std::log(std::max(prior, 1e-12));
    if (counts[c] > 0) ++present;
  }
  if (present < 2) return model;  // constant model: priors decide everything

  std::vector<double> scores(static_cast<std::size_t>(n) * k);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < k; ++c) scores[static_cast<std::size_t>(i) * k + c] = model.base_score[c];
  }
  std::vector<double> probs(scores.size());
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<int> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);

  for (int round = 0; round < config.rounds; ++round) {
    softmax_rows(scores, n, k, probs);
    std::vector<RegressionTree> round_trees(k);
    for (int c = 0; c < k; ++c) {
      for (int i = 0; i < n; ++i) {
        const double p = probs[static_cast<std::size_t>(i) * k + c];
        grad[i] = p - (labels[i] == c ? 1.0 : 0.0);
        hess[i] = p * (1.0 - p);
      }
      TreeBuilder builder{features, grad, hess, config, {}, {}};
      builder.build(all_rows, 0);
      round_trees[c].nodes = std::move(builder.nodes);
      for (int i = 0; i < n; ++i) {
        scores[static_cast<std::size_t>(i) * k + c] += round_trees[c].predict(features.row(i));
      }
    }
    model.trees.push_back(std::move(round_trees));
  }
  return model;
}

std::vector<double> gbdt_raw_scores(const GbdtModel& model, const double* row) {
  std::vector<double> scores = model.base_score;
  for (const auto& round : model.trees) {
    for (int c = 0; c < model.n_classes; ++c) scores[c] += round[c].predict(row);
  }
  return scores;
}

std::vector<int> gbdt_predict(const GbdtModel& model, const Matrix& queries) {
  if (queries.cols != model.n_features) {
    fail(Errc::DimensionMismatch, "gbdt: query width does not match training features");
  }
  std::vector<int> out(queries.rows);
  for (int i = 0; i < queries.rows; ++i) {
    const std::vector<double> scores = gbdt_raw_scores(model, queries.row(i));
    int best = 0;
    for (int c = 1; c < model.n_classes; ++c) {
      if (scores[c] > scores[best]) best = c;
    }
    out[i] = best;
  }
  return out;
}

}  // namespace microsage
