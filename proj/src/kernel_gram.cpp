#include "sae_info/kernel_gram.hpp"

#include <cmath>

#include "sae_info/errors.hpp"
#include "sae_info/parallel_kernels.hpp"

namespace sae_info {

void KernelConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("kernel h must be > 0");
  if (sigma_override && !(*sigma_override > 0.0))
    throw ConfigError("kernel sigma override must be > 0");
}

double KernelConfig::sigma_for(int n, int dim) const {
  if (sigma_override) return *sigma_override;
  return silverman_sigma(n, dim, h);
}

double silverman_sigma(int n, int d, double h) {
  if (n < 2) throw ConfigError("silverman_sigma needs n >= 2");
  if (d < 1) throw ConfigError("silverman_sigma needs d >= 1");
  if (!(h > 0.0)) throw ConfigError("silverman_sigma needs h > 0");
  return h * std::pow(static_cast<double>(n), -1.0 / (4.0 + d));
}

Matrix gram_gaussian(const Matrix& batch, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("kernel width must be > 0");
  if (batch.rows() < 2) throw ConfigError("Gram matrix needs at least 2 samples");
  if (!batch.allFinite()) throw DataError("batch contains non-finite entries");
  Matrix k = kernels::gaussian_from_sq_distances(kernels::pairwise_sq_distances(batch), sigma);
  k.diagonal().setOnes();
  return k;
}

NPDMatrix normalize_gram(const Matrix& gram) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) throw ShapeError("Gram matrix must be square");
  const Eigen::Index n = gram.rows();
  const Vector diag = gram.diagonal();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(diag(i) > 0.0)) throw DataError("Gram matrix has a nonpositive diagonal entry");
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = inv_n;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = inv_n * gram(i, j) / std::sqrt(diag(i) * diag(j));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return NPDMatrix(std::move(a));
}

NPDMatrix hadamard_joint(const NPDMatrix& a, const NPDMatrix& b) {
  if (a.n() != b.n()) {
    throw ShapeError("hadamard_joint: sizes differ (" + std::to_string(a.n()) + " vs " +
                     std::to_string(b.n()) + ")");
  }
  Matrix c = kernels::hadamard(a.entries(), b.entries());
  const double tr = c.trace();
  c /= tr;
  c.diagonal().setConstant(1.0 / static_cast<double>(c.rows()));
  return NPDMatrix(std::move(c));
}

NPDMatrix npd_from_batch(const Matrix& batch, double sigma) {
  return normalize_gram(gram_gaussian(batch, sigma));
}

}  // namespace sae_info
