#include "microsage/knn.hpp"

#include <algorithm>
#include <string>

#include "microsage/common.hpp"

namespace microsage {

KnnModel knn_fit(const Matrix& features, const std::vector<int>& labels, int k, int n_classes) {
  if (k < 1) fail(Errc::InvalidConfig, "knn: k must be >= 1");
  if (n_classes < 2) fail(Errc::InvalidConfig, "knn: need at least two classes");
  if (features.rows == 0) fail(Errc::DegenerateData, "knn: empty training set");
  if (labels.size() != static_cast<std::size_t>(features.rows)) {
    fail(Errc::ShapeMismatch, "knn: labels length does not match feature rows");
  }
  for (int label : labels) {
    if (label < 0 || label >= n_classes) {
      fail(Errc::LabelOutOfRange, "knn: label " + std::to_string(label) + " out of range");
    }
  }
  KnnModel model;
  model.k = std::min(k, features.rows);
  model.n_classes = n_classes;
  model.train_features = features;
  model.train_labels = labels;
  return model;
}

int knn_predict_one(const KnnModel& model, const double* row, int cols) {
  if (cols != model.train_features.cols) {
    fail(Errc::DimensionMismatch, "knn: query width does not match training features");
  }
  const int n = model.train_features.rows;
  // (squared distance, train index); index breaks distance ties deterministically.
  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i) {
    const double* trow = model.train_features.row(i);
    double d2 = 0.0;
    for (int c = 0; c < cols; ++c) {
      const double diff = row[c] - trow[c];
      d2 += diff * diff;
    }
    dist[i] = {d2, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + model.k, dist.end());

  std::vector<int> votes(model.n_classes, 0);
  for (int i = 0; i < model.k; ++i) votes[model.train_labels[dist[i].second]] += 1;
  int best = 0;
  for (int c = 1; c < model.n_classes; ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return best;
}

std::vector<int> knn_predict(const KnnModel& model, const Matrix& queries) {
  std::vector<int> out(queries.rows);
  for (int i = 0; i < queries.rows; ++i) {
    out[i] = knn_predict_one(model, queries.row(i), queries.cols);
  }
  return out;
}

}  // namespace microsage
