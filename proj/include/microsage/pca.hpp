#pragma once

#include <span>
#include <vector>

#include "microsage/matrix.hpp"

namespace microsage {

/// Eigendecomposition of a symmetric matrix, eigenvalues descending.
/// Row i of vectors is the unit eigenvector for values[i].
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
};

/// Cyclic Jacobi rotations; converged when every off-diagonal magnitude is
/// below tol. Exactness over speed — dimensions stay small (<= ~40) here.
EigenDecomposition jacobi_eigen(const Matrix& sym, double tol = 1e-12, int max_sweeps = 64);

struct PcaModel {
  std::vector<double> mean;                      // d
  Matrix components;                             // k×d, orthonormal rows
  std::vector<double> explained_variance_ratio;  // k entries of lambda_i / total

  int input_dim() const { return components.cols; }
  int component_count() const { return components.rows; }
};

/// Keeps the smallest number of leading components whose variance ratios sum
/// to at least variance_threshold. Components are sign-fixed so their
/// largest-magnitude entry is positive.
PcaModel pca_fit(const Matrix& data, double variance_threshold);

/// components · (x - mean)
std::vector<double> pca_project(const PcaModel& model, std::span<const double> x);

}  // namespace microsage
