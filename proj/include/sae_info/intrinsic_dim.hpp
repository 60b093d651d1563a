#pragma once

#include "sae_info/dataset_io.hpp"

namespace sae_info {

struct DimEstimate {
  double value = 0.0;
  int k_min = 0;
  int k_max = 0;
  int n_used = 0;     // points with all neighbour distances positive
  int n_skipped = 0;  // points dropped because of duplicate neighbours
};

/// Nearest-neighbour maximum-likelihood intrinsic dimension. For each k the
/// per-point inverse estimates (1/(k-1)) sum_{j<k} ln(T_k/T_j) are averaged
/// over points and inverted; the result is the mean over k in [k_min, k_max].
DimEstimate mle_dimension(const Matrix& data, int k_min = 10, int k_max = 20);

}  // namespace sae_info
