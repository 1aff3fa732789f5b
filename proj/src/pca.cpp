#include "microsage/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "microsage/common.hpp"

namespace microsage {

namespace {

double max_off_diagonal(const Matrix& a) {
  double off = 0.0;
  for (int p = 0; p < a.rows; ++p) {
    for (int q = p + 1; q < a.cols; ++q) {
      off = std::max(off, std::abs(a.at(p, q)));
    }
  }
  return off;
}

}  // namespace

EigenDecomposition jacobi_eigen(const Matrix& sym, double tol, int max_sweeps) {
  if (sym.rows != sym.cols) fail(Errc::ShapeMismatch, "jacobi_eigen needs a square matrix");
  const int d = sym.rows;
  Matrix a = sym;
  Matrix v(d, d);
  for (int i = 0; i < d; ++i) v.at(i, i) = 1.0;

  for (int sweep = 0; sweep < max_sweeps && max_off_diagonal(a) > tol; ++sweep) {
    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) <= tol) continue;
        // Rotation angle zeroing a[p][q]; the stable tangent formula.
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // a <- Jᵀ a J with J = G(p, q, theta)
        for (int k = 0; k < d; ++k) {
          const double akp = a.at(k, p);
          const double akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < d; ++k) {
          const double apk = a.at(p, k);
          const double aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < d; ++k) {
          const double vkp = v.at(k, p);
          const double vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](int lhs, int rhs) { return a.at(lhs, lhs) > a.at(rhs, rhs); });

  EigenDecomposition out;
  out.values.resize(d);
  out.vectors = Matrix(d, d);
  for (int i = 0; i < d; ++i) {
    const int src = order[i];
    out.values[i] = a.at(src, src);
    for (int k = 0; k < d; ++k) out.vectors.at(i, k) = v.at(k, src);
  }
  return out;
}

PcaModel pca_fit(const Matrix& data, double variance_threshold) {
  if (!(variance_threshold > 0.0) || variance_threshold > 1.0) {
    fail(Errc::InvalidConfig, "variance_threshold must be in (0, 1]");
  }
  const int n = data.rows;
  const int d = data.cols;
  if (n < 2 || d < 1) fail(Errc::DegenerateData, "pca_fit needs at least 2 rows and 1 column");
  if (!all_finite(data)) fail(Errc::NonFinite, "pca_fit input has non-finite entries");

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* row = data.row(i);
    for (int j = 0; j < d; ++j) model.mean[j] += row[j];
  }
  for (double& m : model.mean) m /= n;

  Matrix centered(n, d);
  for (int i = 0; i < n; ++i) {
    const double* src = data.row(i);
    double* dst = centered.row(i);
    for (int j = 0; j < d; ++j) dst[j] = src[j] - model.mean[j];
  }
  Matrix covariance = matmul_transa(centered, centered);
  scale_inplace(covariance, 1.0 / n);

  EigenDecomposition eig = jacobi_eigen(covariance);
  for (double& lambda : eig.values) lambda = std::max(lambda, 0.0);
  const double total = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
  if (total <= 0.0) fail(Errc::DegenerateData, "data has zero total variance");

  // Smallest k whose cumulative ratio reaches the threshold; the 1e-12 slack
  // makes threshold 1.0 select the numerical rank instead of every component.
  int k = 0;
  double cumulative = 0.0;
  for (int i = 0; i < d; ++i) {
    cumulative += eig.values[i] / total;
    k = i + 1;
    if (cumulative >= variance_threshold - 1e-12) break;
  }

  model.components = Matrix(k, d);
  model.explained_variance_ratio.resize(k);
  for (int i = 0; i < k; ++i) {
    model.explained_variance_ratio[i] = eig.values[i] / total;
    const double* src = eig.vectors.row(i);
    double* dst = model.components.row(i);
    int arg_max = 0;
    for (int j = 0; j < d; ++j) {
      if (std::abs(src[j]) > std::abs(src[arg_max])) arg_max = j;
    }
    const double flip = src[arg_max] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < d; ++j) dst[j] = flip * src[j];
  }
  return model;
}

std::vector<double> pca_project(const PcaModel& model, std::span<const double> x) {
  const int d = model.input_dim();
  if (static_cast<int>(x.size()) != d) {
    fail(Errc::DimensionMismatch, "pca_project expects a vector of length " + std::to_string(d));
  }
  std::vector<double> out(model.component_count(), 0.0);
  for (int i = 0; i < model.component_count(); ++i) {
    const double* comp = model.components.row(i);
    double acc = 0.0;
    for (int j = 0; j < d; ++j) acc += comp[j] * (x[j] - model.mean[j]);
    out[i] = acc;
  }
  return out;
}

}  // namespace microsage
