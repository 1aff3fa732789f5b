#pragma once

#include <vector>

#include "microsage/matrix.hpp"

namespace microsage {

// k-nearest-neighbour classifier on standardized feature rows. Distances are
// plain Euclidean; ties in the vote go to the lower class index.
struct KnnModel {
  int k = 5;
  int n_classes = 0;
  Matrix train_features;
  std::vector<int> train_labels;
};

KnnModel knn_fit(const Matrix& features, const std::vector<int>& labels, int k, int n_classes);

int knn_predict_one(const KnnModel& model, const double* row, int cols);

std::vector<int> knn_predict(const KnnModel& model, const Matrix& queries);

}  // namespace microsage
