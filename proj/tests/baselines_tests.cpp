#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "microsage/common.hpp"
#include "microsage/gbdt.hpp"
#include "microsage/knn.hpp"
#include "microsage/matrix.hpp"
#include "microsage/rng.hpp"

using microsage::GbdtConfig;
using microsage::GbdtModel;
using microsage::KnnModel;
using microsage::Matrix;
using microsage::RegressionTree;

namespace {

Matrix random_matrix(int rows, int cols, microsage::SplitMix64& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform(-2.0, 2.0);
  return m;
}

// Exhaustive-sort reference for kNN: order all training rows by (squared
// distance, index), take k, majority vote with ties to the lower class.
int knn_oracle(const Matrix& train, const std::vector<int>& labels, int k, int n_classes,
               const double* query) {
  std::vector<std::pair<double, int>> dist;
  for (int i = 0; i < train.rows; ++i) {
    double d2 = 0.0;
    for (int c = 0; c < train.cols; ++c) {
      d2 += (query[c] - train.at(i, c)) * (query[c] - train.at(i, c));
    }
    dist.emplace_back(d2, i);
  }
  std::sort(dist.begin(), dist.end());
  std::vector<int> votes(n_classes, 0);
  for (int i = 0; i < k; ++i) ++votes[labels[dist[i].second]];
  int best = 0;
  for (int c = 1; c < n_classes; ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return best;
}

}  // namespace

TEST_CASE("k=1 with one training point always returns its label") {
  Matrix train(1, 2);
  train.data = {0.3, -0.4};
  KnnModel model = microsage::knn_fit(train, {1}, 1, 2);
  microsage::SplitMix64 rng(5);
  for (int i = 0; i < 10; ++i) {
    double q[2] = {rng.uniform(-5, 5), rng.uniform(-5, 5)};
    CHECK(microsage::knn_predict_one(model, q, 2) == 1);
  }
}

TEST_CASE("k=3 majority vote wins") {
  Matrix train(4, 1);
  train.data = {0.1, 0.2, 0.3, 9.0};
  KnnModel model = microsage::knn_fit(train, {1, 1, 0, 0}, 3, 2);
  double q[1] = {0.0};
  // Nearest three are labels (1, 1, 0).
  CHECK(microsage::knn_predict_one(model, q, 1) == 1);
}

TEST_CASE("vote ties resolve to the lower class index") {
  Matrix train(2, 1);
  train.data = {1.0, 2.0};
  // The nearer point has the higher class; the tie must still go to class 0.
  KnnModel model = microsage::knn_fit(train, {1, 0}, 2, 2);
  double q[1] = {0.0};
  CHECK(microsage::knn_predict_one(model, q, 1) == 0);
}

TEST_CASE("distance ties resolve to the lower training index") {
  Matrix train(2, 1);
  train.data = {-1.0, 1.0};  // equidistant from the origin
  KnnModel model = microsage::knn_fit(train, {1, 0}, 1, 2);
  double q[1] = {0.0};
  CHECK(microsage::knn_predict_one(model, q, 1) == 1);
}

TEST_CASE("k equal to n predicts the global majority everywhere") {
  microsage::SplitMix64 rng(88);
  Matrix train = random_matrix(15, 3, rng);
  std::vector<int> labels(15);
  for (int i = 0; i < 15; ++i) labels[i] = i < 9 ? 1 : 0;  // majority class 1
  KnnModel model = microsage::knn_fit(train, labels, 15, 2);
  Matrix queries = random_matrix(12, 3, rng);
  for (int p : microsage::knn_predict(model, queries)) CHECK(p == 1);
}

TEST_CASE("knn_fit clamps k to the training size") {
  Matrix train(4, 2);
  KnnModel model = microsage::knn_fit(train, {0, 1, 0, 1}, 10, 2);
  CHECK(model.k == 4);
}

TEST_CASE("knn matches the exhaustive-sort oracle on random data") {
  microsage::SplitMix64 rng(2025);
  Matrix train = random_matrix(50, 13, rng);
  std::vector<int> labels(50);
  for (int& l : labels) l = static_cast<int>(rng.next_below(3));
  KnnModel model = microsage::knn_fit(train, labels, 5, 3);

  Matrix queries = random_matrix(40, 13, rng);
  std::vector<int> got = microsage::knn_predict(model, queries);
  for (int q = 0; q < queries.rows; ++q) {
    CHECK(got[q] == knn_oracle(train, labels, 5, 3, queries.row(q)));
  }
}

TEST_CASE("knn rejects invalid configurations") {
  Matrix train(3, 2);
  std::vector<int> labels{0, 1, 0};
  CHECK_THROWS_AS((void)microsage::knn_fit(train, labels, 0, 2), microsage::Error);
  CHECK_THROWS_AS((void)microsage::knn_fit(train, labels, 3, 1), microsage::Error);
  CHECK_THROWS_AS((void)microsage::knn_fit(Matrix(0, 2), {}, 1, 2), microsage::Error);
  CHECK_THROWS_AS((void)microsage::knn_fit(train, {0, 1, 5}, 1, 2), microsage::Error);
  CHECK_THROWS_AS((void)microsage::knn_fit(train, {0, 1}, 1, 2), microsage::Error);

  KnnModel model = microsage::knn_fit(train, labels, 1, 2);
  double q[4] = {0, 0, 0, 0};
  CHECK_THROWS_AS((void)microsage::knn_predict_one(model, q, 4), microsage::Error);
}

namespace {

struct OracleSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Brute-force exact greedy split search over all (feature, boundary) pairs.
OracleSplit oracle_best_split(const Matrix& x, const std::vector<int>& rows,
                              const std::vector<double>& grad, const std::vector<double>& hess,
                              const GbdtConfig& cfg) {
  OracleSplit best;
  double g_total = 0.0, h_total = 0.0;
  for (int r : rows) {
    g_total += grad[r];
    h_total += hess[r];
  }
  const double parent = g_total * g_total / (h_total + cfg.lambda);
  for (int f = 0; f < x.cols; ++f) {
    std::vector<std::pair<double, int>> order;
    for (int r : rows) order.emplace_back(x.at(r, f), r);
    std::sort(order.begin(), order.end());
    double g_left = 0.0, h_left = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      g_left += grad[order[i].second];
      h_left += hess[order[i].second];
      if (order[i].first == order[i + 1].first) continue;
      const double h_right = h_total - h_left;
      if (h_left < cfg.min_child_weight || h_right < cfg.min_child_weight) continue;
      const double g_right = g_total - g_left;
      const double gain = 0.5 * (g_left * g_left / (h_left + cfg.lambda) +
                                 g_right * g_right / (h_right + cfg.lambda) - parent);
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

// Walks a fitted tree and re-derives every split and leaf from the gradient
// statistics of the rows that reach it.
void verify_tree(const RegressionTree& tree, int idx, std::vector<int> rows, int depth,
                 const Matrix& x, const std::vector<double>& grad,
                 const std::vector<double>& hess, const GbdtConfig& cfg) {
  const microsage::TreeNode& node = tree.nodes[idx];
  if (node.feature < 0) {
    double g = 0.0, h = 0.0;
    for (int r : rows) {
      g += grad[r];
      h += hess[r];
    }
    CHECK(node.weight == doctest::Approx(cfg.eta * (-g / (h + cfg.lambda))).epsilon(1e-12));
    if (depth < cfg.max_depth && rows.size() >= 2) {
      CHECK_FALSE(oracle_best_split(x, rows, grad, hess, cfg).found);
    }
    return;
  }
  REQUIRE(depth < cfg.max_depth);
  OracleSplit want = oracle_best_split(x, rows, grad, hess, cfg);
  REQUIRE(want.found);
  CHECK(node.feature == want.feature);
  CHECK(node.threshold == doctest::Approx(want.threshold).epsilon(1e-12));

  std::vector<int> left, right;
  for (int r : rows) (x.at(r, node.feature) < node.threshold ? left : right).push_back(r);
  verify_tree(tree, node.left, std::move(left), depth + 1, x, grad, hess, cfg);
  verify_tree(tree, node.right, std::move(right), depth + 1, x, grad, hess, cfg);
}

// First-round gradients: log-prior base scores through a stable softmax.
// The probabilities equal the class priors mathematically, but the softmax
// round-trip must be reproduced bit-for-bit or near-tied split gains can
// resolve differently than in the fitted tree.
void first_round_stats(const std::vector<int>& labels, int n_classes, int cls,
                       std::vector<double>& grad, std::vector<double>& hess) {
  const int n = static_cast<int>(labels.size());
  std::vector<std::int64_t> counts(n_classes, 0);
  for (int l : labels) counts[l] += 1;
  std::vector<double> base(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    const double prior = static_cast<double>(counts[c]) / static_cast<double>(n);
    base[c] = std::log(std::max(prior, 1e-12));
  }
  double row_max = base[0];
  for (int c = 1; c < n_classes; ++c) row_max = std::max(row_max, base[c]);
  std::vector<double> p(n_classes);
  double denom = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    p[c] = std::exp(base[c] - row_max);
    denom += p[c];
  }
  for (int c = 0; c < n_classes; ++c) p[c] /= denom;
  grad.resize(n);
  hess.resize(n);
  for (int i = 0; i < n; ++i) {
    grad[i] = p[cls] - (labels[i] == cls ? 1.0 : 0.0);
    hess[i] = p[cls] * (1.0 - p[cls]);
  }
}

double independent_tree_walk(const RegressionTree& tree, const double* row) {
  int idx = 0;
  while (tree.nodes[idx].feature >= 0) {
    const auto& node = tree.nodes[idx];
    idx = row[node.feature] < node.threshold ? node.left : node.right;
  }
  return tree.nodes[idx].weight;
}

}  // namespace

TEST_CASE("a two-point 1-D problem splits between the points") {
  Matrix x(2, 1);
  x.data = {0.0, 1.0};
  GbdtConfig cfg;
  cfg.rounds = 1;
  cfg.max_depth = 1;
  cfg.min_child_weight = 0.0;
  GbdtModel model = microsage::gbdt_fit(x, {0, 1}, 2, cfg);

  REQUIRE(model.trees.size() == 1);
  for (int cls = 0; cls < 2; ++cls) {
    const RegressionTree& tree = model.trees[0][cls];
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == doctest::Approx(0.5));
    const double left = tree.nodes[tree.nodes[0].left].weight;
    const double right = tree.nodes[tree.nodes[0].right].weight;
    CHECK(left * right < 0.0);  // opposite signs
    // Closed form: g = +-0.5, h = 0.25 per point.
    CHECK(std::abs(left) == doctest::Approx(cfg.eta * 0.5 / (0.25 + cfg.lambda)).epsilon(1e-12));
  }
  // The model separates the two points.
  std::vector<int> preds = microsage::gbdt_predict(model, x);
  CHECK(preds == std::vector<int>{0, 1});
}

TEST_CASE("single-class data yields the constant prior model") {
  Matrix x(4, 2);
  x.data = {0, 0, 1, 1, 2, 2, 3, 3};
  GbdtConfig cfg;
  GbdtModel model = microsage::gbdt_fit(x, {1, 1, 1, 1}, 3, cfg);
  CHECK(model.trees.empty());
  CHECK(model.base_score[1] == doctest::Approx(0.0).scale(1.0));  // log(1)
  CHECK(model.base_score[0] == doctest::Approx(std::log(1e-12)));
  std::vector<int> preds = microsage::gbdt_predict(model, x);
  for (int p : preds) CHECK(p == 1);
}

TEST_CASE("base scores are the log class priors") {
  Matrix x(4, 1);
  x.data = {0, 1, 2, 3};
  GbdtConfig cfg;
  cfg.rounds = 1;
  GbdtModel model = microsage::gbdt_fit(x, {0, 0, 0, 1}, 2, cfg);
  CHECK(model.base_score[0] == doctest::Approx(std::log(0.75)).epsilon(1e-12));
  CHECK(model.base_score[1] == doctest::Approx(std::log(0.25)).epsilon(1e-12));
}

TEST_CASE("first-round trees match the brute-force split oracle") {
  microsage::SplitMix64 rng(7070);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix x = random_matrix(40, 3, rng);
    std::vector<int> labels(40);
    for (int& l : labels) l = static_cast<int>(rng.next_below(2));

    GbdtConfig cfg;
    cfg.rounds = 1;
    cfg.max_depth = 2;
    GbdtModel model = microsage::gbdt_fit(x, labels, 2, cfg);
    REQUIRE(model.trees.size() == 1);

    std::vector<int> all_rows(40);
    for (int i = 0; i < 40; ++i) all_rows[i] = i;
    for (int cls = 0; cls < 2; ++cls) {
      std::vector<double> grad, hess;
      first_round_stats(labels, 2, cls, grad, hess);
      verify_tree(model.trees[0][cls], 0, all_rows, 0, x, grad, hess, cfg);
    }
  }
}

TEST_CASE("gbdt learns a simple threshold function") {
  Matrix x(20, 2);
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) {
    x.at(i, 0) = i / 19.0;
    x.at(i, 1) = (i * 7 % 20) / 19.0;  // irrelevant feature
    labels[i] = x.at(i, 0) > 0.5 ? 1 : 0;
  }
  GbdtConfig cfg;
  cfg.rounds = 20;
  cfg.max_depth = 2;
  cfg.min_child_weight = 0.0;
  GbdtModel model = microsage::gbdt_fit(x, labels, 2, cfg);
  CHECK(microsage::gbdt_predict(model, x) == labels);
}

TEST_CASE("training log-loss never increases across rounds") {
  microsage::SplitMix64 rng(99);
  Matrix x = random_matrix(60, 4, rng);
  std::vector<int> labels(60);
  for (int i = 0; i < 60; ++i) {
    labels[i] = (x.at(i, 0) + 0.5 * x.at(i, 2) > 0.0 ? 1 : 0);
    if (rng.next_double() < 0.1) labels[i] = 1 - labels[i];  // label noise
  }
  GbdtConfig cfg;
  cfg.rounds = 30;
  cfg.eta = 0.3;
  GbdtModel model = microsage::gbdt_fit(x, labels, 2, cfg);
  REQUIRE(model.trees.size() == 30);

  // Replay the ensemble round by round and track the multiclass log-loss.
  std::vector<std::vector<double>> scores(60, model.base_score);
  double prev_loss = 1e300;
  for (std::size_t round = 0; round <= model.trees.size(); ++round) {
    if (round > 0) {
      for (int i = 0; i < 60; ++i)
        for (int c = 0; c < 2; ++c)
          scores[i][c] += model.trees[round - 1][c].predict(x.row(i));
    }
    double loss = 0.0;
    for (int i = 0; i < 60; ++i) {
      const double m = std::max(scores[i][0], scores[i][1]);
      const double denom = std::exp(scores[i][0] - m) + std::exp(scores[i][1] - m);
      loss -= (scores[i][labels[i]] - m) - std::log(denom);
    }
    loss /= 60.0;
    CHECK(loss <= prev_loss + 1e-9);
    prev_loss = loss;
  }
}

TEST_CASE("gbdt_predict agrees with an independent tree interpreter") {
  microsage::SplitMix64 rng(123);
  Matrix x = random_matrix(30, 5, rng);
  std::vector<int> labels(30);
  for (int& l : labels) l = static_cast<int>(rng.next_below(3));
  GbdtConfig cfg;
  cfg.rounds = 8;
  cfg.max_depth = 3;
  GbdtModel model = microsage::gbdt_fit(x, labels, 3, cfg);

  Matrix queries = random_matrix(20, 5, rng);
  std::vector<int> got = microsage::gbdt_predict(model, queries);
  for (int q = 0; q < 20; ++q) {
    std::vector<double> scores = model.base_score;
    for (const auto& round : model.trees)
      for (int c = 0; c < 3; ++c) scores[c] += independent_tree_walk(round[c], queries.row(q));
    int best = 0;
    for (int c = 1; c < 3; ++c)
      if (scores[c] > scores[best]) best = c;
    CHECK(got[q] == best);
  }
}

TEST_CASE("gbdt is deterministic") {
  microsage::SplitMix64 rng(4);
  Matrix x = random_matrix(25, 3, rng);
  std::vector<int> labels(25);
  for (int& l : labels) l = static_cast<int>(rng.next_below(2));
  GbdtConfig cfg;
  cfg.rounds = 5;
  GbdtModel a = microsage::gbdt_fit(x, labels, 2, cfg);
  GbdtModel b = microsage::gbdt_fit(x, labels, 2, cfg);
  Matrix queries = random_matrix(10, 3, rng);
  CHECK(microsage::gbdt_predict(a, queries) == microsage::gbdt_predict(b, queries));
  CHECK(a.base_score == b.base_score);
}

TEST_CASE("gbdt rejects invalid inputs") {
  Matrix x(4, 2);
  std::vector<int> labels{0, 1, 0, 1};
  GbdtConfig cfg;

  GbdtConfig bad = cfg;
  bad.rounds = 0;
  CHECK_THROWS_AS((void)microsage::gbdt_fit(x, labels, 2, bad), microsage::Error);
  bad = cfg;
  bad.eta = 0.0;
  CHECK_THROWS_AS((void)microsage::gbdt_fit(x, labels, 2, bad), microsage::Error);

  CHECK_THROWS_AS((void)microsage::gbdt_fit(x, labels, 1, cfg), microsage::Error);
  CHECK_THROWS_AS((void)microsage::gbdt_fit(Matrix(1, 2), {0}, 2, cfg), microsage::Error);
  CHECK_THROWS_AS((void)microsage::gbdt_fit(x, {0, 1}, 2, cfg), microsage::Error);
  CHECK_THROWS_AS((void)microsage::gbdt_fit(x, {0, 1, 2, 0}, 2, cfg), microsage::Error);

  GbdtModel model = microsage::gbdt_fit(x, labels, 2, cfg);
  Matrix wrong_width(2, 5);
  CHECK_THROWS_AS((void)microsage::gbdt_predict(model, wrong_width), microsage::Error);
}
