#pragma once

#include <cstdint>
#include <vector>

#include "microsage/graph.hpp"
#include "microsage/matrix.hpp"

namespace microsage {

/// One GraphSAGE convolution: x'_i = W1·x_i + W2·mean_{j in N(i)} x_j.
/// Both weight matrices are out×in.
struct SageLayer {
  Matrix w1;  // self weight
  Matrix w2;  // neighbor weight
};

/// Two convolutions with a ReLU between them; layer2 maps to class logits.
struct GraphSageModel {
  SageLayer layer1;
  SageLayer layer2;

  int input_dim() const { return layer1.w1.cols; }
  int hidden_dim() const { return layer1.w1.rows; }
  int n_classes() const { return layer2.w1.rows; }
};

/// Activations captured by the forward pass; the backward pass needs all of
/// them. `valid` guards against backward without a matching forward.
struct ForwardCache {
  bool valid = false;
  Matrix aggregated_input;   // A·X
  Matrix pre_activation;     // Z1 = X·W1ᵀ + (A·X)·W2ᵀ
  Matrix hidden;             // H = ReLU(Z1)
  Matrix aggregated_hidden;  // A·H
};

struct Gradients {
  SageLayer layer1;
  SageLayer layer2;
};

struct AdamState {
  std::vector<Matrix> m;  // first moments, order: l1.w1, l1.w2, l2.w1, l2.w2
  std::vector<Matrix> v;  // second moments
  std::int64_t t = 0;
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  int epochs = 300;
  double lr = 1e-2;
  int hidden_dim = 64;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
};

struct EpochStats {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

/// Row i of the result is the mean of the feature rows of N(i); the zero
/// vector when N(i) is empty.
Matrix sage_mean_aggregate(const Matrix& features, const EdgeGraph& graph);

Matrix sage_layer_forward(const Matrix& x, const EdgeGraph& graph, const SageLayer& layer);

Matrix model_forward(const GraphSageModel& model, const EdgeGraph& graph);
Matrix model_forward(const GraphSageModel& model, const EdgeGraph& graph, ForwardCache& cache);

struct LossGrad {
  double loss = 0.0;
  Matrix dlogits;
};

/// Mean masked cross-entropy with max-subtraction stabilization. dlogits
/// rows are (softmax - onehot)/|mask| on masked rows, zero elsewhere.
LossGrad softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                               const std::vector<std::uint8_t>& mask);

/// Exact analytic gradients of the masked loss for all four weight
/// matrices.
Gradients model_backward(const GraphSageModel& model, const EdgeGraph& graph,
                         const Matrix& dlogits, const ForwardCache& cache);

AdamState adam_init(const GraphSageModel& model, double lr);
void adam_step(GraphSageModel& model, const Gradients& grads, AdamState& state);

/// Argmax per row, ties to the lower class index.
std::vector<int> predict(const Matrix& logits);

double masked_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                       const std::vector<std::uint8_t>& mask);

/// Glorot-uniform init from the given seed.
GraphSageModel init_model(int input_dim, int hidden_dim, int n_classes, std::uint64_t seed);

struct TrainResult {
  GraphSageModel model;
  std::vector<EpochStats> history;  // entry e: stats at the weights entering epoch e+1
};

/// Full-graph training: per epoch one forward pass, masked train loss, the
/// hand-derived backward pass, and one Adam step. Deterministic for a fixed
/// seed.
TrainResult train(const EdgeGraph& graph, const TrainConfig& config);

}  // namespace microsage
