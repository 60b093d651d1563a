#include "sae_info/parallel_kernels.hpp"

#include <algorithm>
#include <cmath>

#include "sae_info/errors.hpp"

namespace sae_info::kernels {
namespace {

inline double sq_dist(const Matrix& x, Eigen::Index i, Eigen::Index j) {
  const double* a = x.data() + i * x.cols();
  const double* b = x.data() + j * x.cols();
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

void knn_row(const Matrix& x, Eigen::Index i, int k, std::vector<double>& scratch, Matrix& out) {
  scratch.clear();
  for (Eigen::Index j = 0; j < x.rows(); ++j)
    if (j != i) scratch.push_back(sq_dist(x, i, j));
  std::partial_sort(scratch.begin(), scratch.begin() + k, scratch.end());
  for (int t = 0; t < k; ++t) out(i, t) = std::sqrt(scratch[t]);
}

void check_knn(const Matrix& x, int k) {
  if (k < 1 || k >= x.rows()) throw ConfigError("k must satisfy 1 <= k < N");
}

}  // namespace

Matrix pairwise_sq_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix d(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = sq_dist(x, i, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Matrix gaussian_from_sq_distances(const Matrix& sq_dist, double sigma) {
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Matrix k(sq_dist.rows(), sq_dist.cols());
  const Eigen::Index total = k.size();
#pragma omp parallel for schedule(static)
  for (Eigen::Index t = 0; t < total; ++t) k.data()[t] = std::exp(sq_dist.data()[t] * scale);
  return k;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), a.cols());
  const Eigen::Index total = c.size();
#pragma omp parallel for schedule(static)
  for (Eigen::Index t = 0; t < total; ++t) c.data()[t] = a.data()[t] * b.data()[t];
  return c;
}

Matrix knn_distances(const Matrix& x, int k) {
  check_knn(x, k);
  Matrix out(x.rows(), k);
#pragma omp parallel
  {
    std::vector<double> scratch;
    scratch.reserve(x.rows());
#pragma omp for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < x.rows(); ++i) knn_row(x, i, k, scratch, out);
  }
  return out;
}

namespace serial {

Matrix pairwise_sq_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = sq_dist(x, i, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Matrix gaussian_from_sq_distances(const Matrix& sq_dist, double sigma) {
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Matrix k(sq_dist.rows(), sq_dist.cols());
  for (Eigen::Index t = 0; t < k.size(); ++t) k.data()[t] = std::exp(sq_dist.data()[t] * scale);
  return k;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), a.cols());
  for (Eigen::Index t = 0; t < c.size(); ++t) c.data()[t] = a.data()[t] * b.data()[t];
  return c;
}

Matrix knn_distances(const Matrix& x, int k) {
  check_knn(x, k);
  Matrix out(x.rows(), k);
  std::vector<double> scratch;
  scratch.reserve(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) knn_row(x, i, k, scratch, out);
  return out;
}

}  // namespace serial
}  // namespace sae_info::kernels
