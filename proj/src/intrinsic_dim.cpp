#include "sae_info/intrinsic_dim.hpp"

#include <cmath>

#include "sae_info/errors.hpp"
#include "sae_info/parallel_kernels.hpp"

namespace sae_info {

DimEstimate mle_dimension(const Matrix& data, int k_min, int k_max) {
  const auto n = static_cast<int>(data.rows());
  if (k_min < 2 || k_min > k_max) throw ConfigError("need 2 <= k_min <= k_max");
  if (k_max >= n) {
    throw ConfigError("k_max (" + std::to_string(k_max) + ") must be below the sample count (" +
                      std::to_string(n) + ")");
  }
  if (!data.allFinite()) throw DataError("data contains non-finite entries");

  const Matrix nn = kernels::knn_distances(data, k_max);

  DimEstimate est;
  est.k_min = k_min;
  est.k_max = k_max;
  std::vector<bool> usable(n);
  for (int i = 0; i < n; ++i) {
    usable[i] = nn(i, 0) > 0.0;
    if (usable[i]) ++est.n_used;
  }
  est.n_skipped = n - est.n_used;
  if (est.n_used == 0) throw DataError("every point has a duplicate neighbour");

  double total = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    double inverse_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!usable[i]) continue;
      const double log_tk = std::log(nn(i, k - 1));
      double s = 0.0;
      for (int j = 0; j < k - 1; ++j) s += log_tk - std::log(nn(i, j));
      inverse_sum += s / (k - 1);
    }
    total += est.n_used / inverse_sum;
  }
  est.value = total / (k_max - k_min + 1);
  if (!std::isfinite(est.value)) throw DataError("degenerate neighbour distances");
  return est;
}

}  // namespace sae_info
