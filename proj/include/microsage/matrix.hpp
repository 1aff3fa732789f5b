#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace microsage {

/// Dense row-major matrix of 64-bit reals. The whole pipeline runs in
/// doubles so test oracles (finite differences, hand-unrolled recurrences)
/// compare at tight tolerances.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }

  std::span<const double> row_span(int i) const { return {row(i), static_cast<std::size_t>(cols)}; }
  std::span<double> row_span(int i) { return {row(i), static_cast<std::size_t>(cols)}; }

  double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }

  bool operator==(const Matrix& other) const = default;
};

/// a (m×k) · b (k×n) -> m×n
Matrix matmul(const Matrix& a, const Matrix& b);

/// a (m×k) · bᵀ with b (n×k) -> m×n. Both operands walk rows contiguously.
Matrix matmul_transb(const Matrix& a, const Matrix& b);

/// aᵀ with a (n×m), times b (n×k) -> m×k.
Matrix matmul_transa(const Matrix& a, const Matrix& b);

void add_inplace(Matrix& a, const Matrix& b);
void scale_inplace(Matrix& a, double factor);

bool all_finite(const Matrix& a);

}  // namespace microsage
