#pragma once

#include <optional>

#include "sae_info/dataset_io.hpp"

namespace sae_info {

/// Trace-normalized Gram matrix with a constant 1/N diagonal. Instances are
/// only produced by normalize_gram and hadamard_joint, which maintain the
/// invariants (symmetric, unit trace, positive semidefinite up to rounding).
class NPDMatrix {
 public:
  const Matrix& entries() const { return entries_; }
  Eigen::Index n() const { return entries_.rows(); }

 private:
  explicit NPDMatrix(Matrix m) : entries_(std::move(m)) {}
  Matrix entries_;

  friend NPDMatrix normalize_gram(const Matrix& gram);
  friend NPDMatrix hadamard_joint(const NPDMatrix& a, const NPDMatrix& b);
};

struct KernelConfig {
  double h = 6.0;
  std::optional<double> sigma_override;

  void validate() const;
  /// Silverman width for a layer of dimensionality `dim` on a batch of `n`,
  /// unless sigma_override is set.
  double sigma_for(int n, int dim) const;
};

/// h * n^(-1/(4+d)). Requires n >= 2, d >= 1, h > 0.
double silverman_sigma(int n, int d, double h);

/// K_ij = exp(-|x_i - x_j|^2 / (2 sigma^2)). Throws DataError on non-finite
/// input and ConfigError when sigma <= 0 or N < 2.
Matrix gram_gaussian(const Matrix& batch, double sigma);

/// A_ij = K_ij / (N sqrt(K_ii K_jj)).
NPDMatrix normalize_gram(const Matrix& gram);

/// (A∘B) / tr(A∘B). Throws ShapeError on size mismatch.
NPDMatrix hadamard_joint(const NPDMatrix& a, const NPDMatrix& b);

/// Convenience: normalize_gram(gram_gaussian(batch, sigma)).
NPDMatrix npd_from_batch(const Matrix& batch, double sigma);

}  // namespace sae_info
