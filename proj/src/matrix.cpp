#include "microsage/matrix.hpp"

#include <cmath>
#include <string>

#include "microsage/common.hpp"

namespace microsage {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) fail(Errc::ShapeMismatch, what);
}

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, "matmul " + shape_str(a) + " * " + shape_str(b));
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix matmul_transb(const Matrix& a, const Matrix& b) {
  require(a.cols == b.cols, "matmul_transb " + shape_str(a) + " * " + shape_str(b) + "^T");
  Matrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = b.row(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      orow[j] = acc;
    }
  }
  return out;
}

Matrix matmul_transa(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows, "matmul_transa " + shape_str(a) + "^T * " + shape_str(b));
  Matrix out(a.cols, b.cols);
  for (int n = 0; n < a.rows; ++n) {
    const double* arow = a.row(n);
    const double* brow = b.row(n);
    for (int i = 0; i < a.cols; ++i) {
      const double ani = arow[i];
      if (ani == 0.0) continue;
      double* orow = out.row(i);
      for (int j = 0; j < b.cols; ++j) orow[j] += ani * brow[j];
    }
  }
  return out;
}

void add_inplace(Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "add_inplace " + shape_str(a) + " + " + shape_str(b));
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

void scale_inplace(Matrix& a, double factor) {
  for (double& v : a.data) v *= factor;
}

bool all_finite(const Matrix& a) {
  for (double v : a.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace microsage
