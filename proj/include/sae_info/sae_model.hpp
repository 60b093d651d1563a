#pragma once

#include <cstdint>
#include <vector>

#include "sae_info/dataset_io.hpp"

namespace sae_info {

enum class Activation : std::uint8_t { kSigmoid = 0, kLinear = 1 };

struct DenseLayer {
  Matrix weights;  // fan_in x fan_out; outputs are act(inputs * weights + bias)
  Vector bias;
  Activation activation = Activation::kSigmoid;
};

/// Stacked autoencoder with palindromic widths [m, d1, ..., K, ..., d1, m].
/// The bottleneck (width K) is linear; every other layer is sigmoid, except
/// that the output layer may be made linear for linear-autoencoder studies.
struct SAEModel {
  std::vector<int> dims;
  std::vector<DenseLayer> layers;  // dims.size() - 1 entries
  std::uint64_t seed = 0;

  int input_dim() const { return dims.front(); }
  int bottleneck_dim() const { return dims[encoder_depth()]; }
  /// Number of encoder layers including the bottleneck, i.e. the index of the
  /// bottleneck in `dims`.
  int encoder_depth() const { return static_cast<int>(dims.size() - 1) / 2; }
  std::size_t parameter_count() const;

  /// Checks palindrome topology, activation placement and shape chaining.
  void validate() const;
};

/// Validates a palindromic, odd-length topology of at least three widths.
void validate_topology(const std::vector<int>& dims);

/// Glorot-uniform weights in [-r, r], r = sqrt(6 / (fan_in + fan_out)), zero biases.
SAEModel build_sae(const std::vector<int>& dims, std::uint64_t seed,
                   Activation output_activation = Activation::kSigmoid);

/// Outputs of every layer for one batch. layer(0) is the input X, layer(L-1)
/// the reconstruction X'.
struct ActivationSet {
  std::vector<Matrix> layers;

  const Matrix& input() const { return layers.front(); }
  const Matrix& reconstruction() const { return layers.back(); }
  std::size_t size() const { return layers.size(); }
};

ActivationSet forward(const SAEModel& model, const Matrix& batch);

/// Reconstruction only; avoids keeping intermediate layers.
Matrix reconstruct(const SAEModel& model, const Matrix& batch);

/// Mean over samples and features of (x - x')^2.
double mean_squared_error(const Matrix& x, const Matrix& x_hat);
double reconstruction_mse(const SAEModel& model, const Matrix& data);

/// Top-k eigenvectors of the uncentered scatter X^T X as orthonormal columns,
/// sorted by descending eigenvalue.
Eigen::MatrixXd pca_top_eigvecs(const Matrix& data, int k);

}  // namespace sae_info
