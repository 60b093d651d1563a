#pragma once

#include "sae_info/kernel_gram.hpp"

namespace sae_info {

inline constexpr double kDefaultAlpha = 1.01;

struct EntropyValue {
  double bits = 0.0;
  double alpha = 0.0;  // 1.0 marks the Shannon limit
  Eigen::Index n = 0;
};

struct MutualInfoValue {
  double bits = 0.0;
  double alpha = 0.0;
  Eigen::Index n = 0;
};

/// Eigenvalues of A in ascending order, clipped into [0, 1]. Throws
/// NumericalError if any eigenvalue is below -1e-6.
Vector npd_spectrum(const NPDMatrix& a);

/// (1/(1-alpha)) log2 sum_i lambda_i^alpha over an already-clipped spectrum.
double renyi_bits_from_spectrum(const Vector& spectrum, double alpha);

/// -sum_i lambda_i log2 lambda_i over the positive part of the spectrum.
double shannon_bits_from_spectrum(const Vector& spectrum);

/// Matrix-based Renyi alpha-entropy in bits. alpha must be > 0 and != 1.
EntropyValue entropy_alpha(const NPDMatrix& a, double alpha);

/// alpha -> 1 limit of entropy_alpha.
EntropyValue shannon_limit(const NPDMatrix& a);

/// Entropy of the normalized Hadamard product; symmetric in its arguments.
EntropyValue joint_entropy(const NPDMatrix& a, const NPDMatrix& b, double alpha);

/// S(A) + S(B) - S(A, B).
MutualInfoValue mutual_information(const NPDMatrix& a, const NPDMatrix& b, double alpha);

/// Parzen-window plug-in estimate of Renyi's quadratic entropy, in nats:
/// -log( (1/N^2) sum_ij G_{sigma*sqrt(2)}(x_i - x_j) ), G the d-variate
/// normalized Gaussian density.
double parzen_quadratic_entropy(const Matrix& batch, double sigma);

}  // namespace sae_info
