#include "microsage/sage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "microsage/common.hpp"
#include "microsage/rng.hpp"

namespace microsage {

namespace {

void check_node_rows(const Matrix& m, const EdgeGraph& graph, const char* where) {
  if (m.rows != graph.node_count) {
    fail(Errc::ShapeMismatch, std::string(where) + ": expected " +
                                  std::to_string(graph.node_count) + " rows, got " +
                                  std::to_string(m.rows));
  }
}

}  // namespace

Matrix sage_mean_aggregate(const Matrix& features, const EdgeGraph& graph) {
  check_node_rows(features, graph, "sage_mean_aggregate");
  const int d = features.cols;
  Matrix out(features.rows, d);
  for (int i = 0; i < graph.node_count; ++i) {
    const auto neighbors = graph.neighbors(i);
    if (neighbors.empty()) continue;
    double* orow = out.row(i);
    for (int j : neighbors) {
      const double* frow = features.row(j);
      for (int k = 0; k < d; ++k) orow[k] += frow[k];
    }
    const double inv = 1.0 / static_cast<double>(neighbors.size());
    for (int k = 0; k < d; ++k) orow[k] *= inv;
  }
  return out;
}

namespace {

// Adjoint of mean aggregation: out_j = sum_{i in N(j)} grad_i / deg(i).
// Adjacency is symmetric, so the same CSR rows serve as the transpose.
Matrix sage_mean_aggregate_adjoint(const Matrix& grad, const EdgeGraph& graph) {
  check_node_rows(grad, graph, "sage_mean_aggregate_adjoint");
  const int d = grad.cols;
  Matrix out(grad.rows, d);
  for (int j = 0; j < graph.node_count; ++j) {
    double* orow = out.row(j);
    for (int i : graph.neighbors(j)) {
      const double inv = 1.0 / static_cast<double>(graph.degree(i));
      const double* grow = grad.row(i);
      for (int k = 0; k < d; ++k) orow[k] += inv * grow[k];
    }
  }
  return out;
}

}  // namespace

Matrix sage_layer_forward(const Matrix& x, const EdgeGraph& graph, const SageLayer& layer) {
  check_node_rows(x, graph, "sage_layer_forward");
  if (x.cols != layer.w1.cols || !layer.w1.same_shape(layer.w2)) {
    fail(Errc::ShapeMismatch, "sage_layer_forward: weight shapes do not match input");
  }
  Matrix out = matmul_transb(x, layer.w1);
  Matrix neighbor_term = matmul_transb(sage_mean_aggregate(x, graph), layer.w2);
  add_inplace(out, neighbor_term);
  return out;
}

Matrix model_forward(const GraphSageModel& model, const EdgeGraph& graph, ForwardCache& cache) {
  check_node_rows(graph.features, graph, "model_forward");
  if (graph.features.cols != model.input_dim()) {
    fail(Errc::ShapeMismatch, "model_forward: feature width does not match model input dim");
  }
  cache.aggregated_input = sage_mean_aggregate(graph.features, graph);
  cache.pre_activation = matmul_transb(graph.features, model.layer1.w1);
  add_inplace(cache.pre_activation, matmul_transb(cache.aggregated_input, model.layer1.w2));

  cache.hidden = cache.pre_activation;
  for (double& v : cache.hidden.data) v = std::max(v, 0.0);

  cache.aggregated_hidden = sage_mean_aggregate(cache.hidden, graph);
  Matrix logits = matmul_transb(cache.hidden, model.layer2.w1);
  add_inplace(logits, matmul_transb(cache.aggregated_hidden, model.layer2.w2));
  cache.valid = true;
  return logits;
}

Matrix model_forward(const GraphSageModel& model, const EdgeGraph& graph) {
  ForwardCache cache;
  return model_forward(model, graph, cache);
}

LossGrad softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                               const std::vector<std::uint8_t>& mask) {
  if (labels.size() != static_cast<std::size_t>(logits.rows) || mask.size() != labels.size()) {
    fail(Errc::ShapeMismatch, "softmax_cross_entropy: labels/mask length mismatch");
  }
  std::int64_t masked = 0;
  for (std::uint8_t m : mask) masked += m ? 1 : 0;
  if (masked == 0) fail(Errc::EmptyMask, "softmax_cross_entropy: mask selects no rows");

  const int n_classes = logits.cols;
  LossGrad out;
  out.dlogits = Matrix(logits.rows, n_classes);
  const double inv_count = 1.0 / static_cast<double>(masked);
  double loss = 0.0;
  for (int i = 0; i < logits.rows; ++i) {
    if (!mask[i]) continue;
    const int label = labels[i];
    if (label < 0 || label >= n_classes) {
      fail(Errc::LabelOutOfRange, "label " + std::to_string(label) + " at row " + std::to_string(i));
    }
    const double* row = logits.row(i);
    double row_max = row[0];
    for (int c = 1; c < n_classes; ++c) row_max = std::max(row_max, row[c]);
    double denom = 0.0;
    for (int c = 0; c < n_classes; ++c) denom += std::exp(row[c] - row_max);
    const double log_denom = std::log(denom);
    loss += inv_count * (log_denom - (row[label] - row_max));

    double* drow = out.dlogits.row(i);
    for (int c = 0; c < n_classes; ++c) {
      const double softmax = std::exp(row[c] - row_max) / denom;
      drow[c] = inv_count * (softmax - (c == label ? 1.0 : 0.0));
    }
  }
  out.loss = loss;
  return out;
}

Gradients model_backward(const GraphSageModel& model, const EdgeGraph& graph,
                         const Matrix& dlogits, const ForwardCache& cache) {
  if (!cache.valid || cache.hidden.rows != graph.node_count) {
    fail(Errc::MissingCache, "model_backward requires the cache of a matching forward pass");
  }
  check_node_rows(dlogits, graph, "model_backward");

  Gradients grads;
  // Layer 2: logits = H·W1ᵀ + (A·H)·W2ᵀ
  grads.layer2.w1 = matmul_transa(dlogits, cache.hidden);
  grads.layer2.w2 = matmul_transa(dlogits, cache.aggregated_hidden);

  // dH = dlogits·W1 + Aᵀ(dlogits)·W2, then through the ReLU mask.
  Matrix dhidden = matmul(dlogits, model.layer2.w1);
  add_inplace(dhidden, matmul(sage_mean_aggregate_adjoint(dlogits, graph), model.layer2.w2));
  for (std::size_t i = 0; i < dhidden.data.size(); ++i) {
    if (cache.pre_activation.data[i] <= 0.0) dhidden.data[i] = 0.0;
  }

  // Layer 1: Z1 = X·W1ᵀ + (A·X)·W2ᵀ
  grads.layer1.w1 = matmul_transa(dhidden, graph.features);
  grads.layer1.w2 = matmul_transa(dhidden, cache.aggregated_input);
  return grads;
}

AdamState adam_init(const GraphSageModel& model, double lr) {
  AdamState state;
  state.lr = lr;
  const Matrix* params[4] = {&model.layer1.w1, &model.layer1.w2, &model.layer2.w1,
                             &model.layer2.w2};
  for (const Matrix* p : params) {
    state.m.emplace_back(p->rows, p->cols);
    state.v.emplace_back(p->rows, p->cols);
  }
  return state;
}

void adam_step(GraphSageModel& model, const Gradients& grads, AdamState& state) {
  Matrix* params[4] = {&model.layer1.w1, &model.layer1.w2, &model.layer2.w1, &model.layer2.w2};
  const Matrix* gs[4] = {&grads.layer1.w1, &grads.layer1.w2, &grads.layer2.w1, &grads.layer2.w2};
  state.t += 1;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (int p = 0; p < 4; ++p) {
    if (!params[p]->same_shape(*gs[p]) || !params[p]->same_shape(state.m[p])) {
      fail(Errc::ShapeMismatch, "adam_step: gradient/state shape mismatch");
    }
    for (std::size_t i = 0; i < params[p]->data.size(); ++i) {
      const double g = gs[p]->data[i];
      double& m = state.m[p].data[i];
      double& v = state.v[p].data[i];
      m = state.beta1 * m + (1.0 - state.beta1) * g;
      v = state.beta2 * v + (1.0 - state.beta2) * g * g;
      const double m_hat = m / bias1;
      const double v_hat = v / bias2;
      params[p]->data[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

std::vector<int> predict(const Matrix& logits) {
  std::vector<int> out(logits.rows);
  for (int i = 0; i < logits.rows; ++i) {
    const double* row = logits.row(i);
    int best = 0;
    for (int c = 1; c < logits.cols; ++c) {
      if (row[c] > row[best]) best = c;
    }
    out[i] = best;
  }
  return out;
}

double masked_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                       const std::vector<std::uint8_t>& mask) {
  std::int64_t total = 0;
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!mask[i]) continue;
    ++total;
    if (predictions[i] == labels[i]) ++hits;
  }
  if (total == 0) fail(Errc::EmptyMask, "masked_accuracy: mask selects no rows");
  return static_cast<double>(hits) / static_cast<double>(total);
}

namespace {

Matrix glorot_uniform(int out_dim, int in_dim, SplitMix64& rng) {
  Matrix w(out_dim, in_dim);
  const double a = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  for (double& v : w.data) v = rng.uniform(-a, a);
  return w;
}

}  // namespace

GraphSageModel init_model(int input_dim, int hidden_dim, int n_classes, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || n_classes < 2) {
    fail(Errc::InvalidConfig, "model dimensions must be positive with >= 2 classes");
  }
  SplitMix64 rng(seed);
  GraphSageModel model;
  model.layer1.w1 = glorot_uniform(hidden_dim, input_dim, rng);
  model.layer1.w2 = glorot_uniform(hidden_dim, input_dim, rng);
  model.layer2.w1 = glorot_uniform(n_classes, hidden_dim, rng);
  model.layer2.w2 = glorot_uniform(n_classes, hidden_dim, rng);
  return model;
}

TrainResult train(const EdgeGraph& graph, const TrainConfig& config) {
  if (config.epochs < 1) fail(Errc::InvalidConfig, "epochs must be >= 1");
  if (graph.train_mask.size() != static_cast<std::size_t>(graph.node_count) ||
      graph.test_mask.size() != static_cast<std::size_t>(graph.node_count)) {
    fail(Errc::EmptyMask, "edge graph has no train/test masks");
  }

  TrainResult result;
  result.model = init_model(graph.features.cols, config.hidden_dim, graph.n_classes, config.seed);
  AdamState adam = adam_init(result.model, config.lr);
  result.history.reserve(config.epochs);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    ForwardCache cache;
    Matrix logits = model_forward(result.model, graph, cache);
    LossGrad loss = softmax_cross_entropy(logits, graph.labels, graph.train_mask);
    if (!std::isfinite(loss.loss)) {
      fail(Errc::NonFiniteLoss,
           "training loss diverged at epoch " + std::to_string(epoch + 1));
    }
    const std::vector<int> preds = predict(logits);
    EpochStats stats;
    stats.train_loss = loss.loss;
    stats.train_accuracy = masked_accuracy(preds, graph.labels, graph.train_mask);
    stats.test_accuracy = masked_accuracy(preds, graph.labels, graph.test_mask);
    result.history.push_back(stats);

    Gradients grads = model_backward(result.model, graph, loss.dlogits, cache);
    adam_step(result.model, grads, adam);
  }
  return result;
}

}  // namespace microsage
