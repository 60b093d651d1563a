#include "sae_info/renyi_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sae_info/errors.hpp"
#include "sae_info/parallel_kernels.hpp"

namespace sae_info {
namespace {

constexpr double kClipSlack = 1e-9;
constexpr double kRejectBelow = -1e-6;

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be > 0");
  if (alpha == 1.0) throw ConfigError("alpha = 1 is the Shannon limit; use shannon_limit");
}

}  // namespace

Vector npd_spectrum(const NPDMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.entries(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition did not converge");
  Vector lambda = solver.eigenvalues();
  if (lambda.size() > 0 && lambda(0) < kRejectBelow) {
    std::ostringstream msg;
    msg << "matrix is not positive semidefinite (min eigenvalue " << lambda(0) << ")";
    throw NumericalError(msg.str());
  }
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    double v = lambda(i);
    if (v < 0.0 && v > -kClipSlack) v = 0.0;
    lambda(i) = std::clamp(v, 0.0, 1.0);
  }
  return lambda;
}

double renyi_bits_from_spectrum(const Vector& spectrum, double alpha) {
  check_alpha(alpha);
  double s = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i)
    if (spectrum(i) > 0.0) s += std::pow(spectrum(i), alpha);
  return std::max(0.0, std::log2(s) / (1.0 - alpha));
}

double shannon_bits_from_spectrum(const Vector& spectrum) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const double l = spectrum(i);
    if (l > 0.0) h -= l * std::log2(l);
  }
  return std::max(0.0, h);
}

EntropyValue entropy_alpha(const NPDMatrix& a, double alpha) {
  check_alpha(alpha);
  return {renyi_bits_from_spectrum(npd_spectrum(a), alpha), alpha, a.n()};
}

EntropyValue shannon_limit(const NPDMatrix& a) {
  return {shannon_bits_from_spectrum(npd_spectrum(a)), 1.0, a.n()};
}

EntropyValue joint_entropy(const NPDMatrix& a, const NPDMatrix& b, double alpha) {
  return entropy_alpha(hadamard_joint(a, b), alpha);
}

MutualInfoValue mutual_information(const NPDMatrix& a, const NPDMatrix& b, double alpha) {
  const double sa = entropy_alpha(a, alpha).bits;
  const double sb = entropy_alpha(b, alpha).bits;
  const double sab = joint_entropy(a, b, alpha).bits;
  return {sa + sb - sab, alpha, a.n()};
}

double parzen_quadratic_entropy(const Matrix& batch, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("kernel width must be > 0");
  if (batch.rows() < 2) throw ConfigError("Parzen estimate needs at least 2 samples");
  if (!batch.allFinite()) throw DataError("batch contains non-finite entries");
  const double n = static_cast<double>(batch.rows());
  const double d = static_cast<double>(batch.cols());
  const double s2 = 2.0 * sigma * sigma;  // variance of G_{sigma*sqrt(2)}
  const Matrix dist = kernels::pairwise_sq_distances(batch);
  double sum = 0.0;
  for (Eigen::Index t = 0; t < dist.size(); ++t) sum += std::exp(-dist.data()[t] / (2.0 * s2));
  const double log_norm = -0.5 * d * std::log(2.0 * M_PI * s2);
  return -(log_norm + std::log(sum / (n * n)));
}

}  // namespace sae_info
