#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sae_info {

// Samples are rows, features are columns.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct LabelVector {
  std::vector<int> labels;
  int n_classes = 0;
};

enum class Embedding { kLinear, kSinusoidalWarp };

struct ManifoldSpec {
  int latent_dim = 1;
  int ambient_dim = 1;
  Embedding embedding = Embedding::kLinear;
  double noise_std = 0.0;
  int n_samples = 1;
  std::uint64_t seed = 0;

  // Throws ConfigError when latent_dim > ambient_dim or any count is < 1.
  void validate() const;
};

const char* to_string(Embedding e);
Embedding embedding_from_string(const std::string& s);

/// Reads an IDX image file (magic 0x00000803, three dimensions) and returns an
/// N x (rows*cols) matrix with pixel bytes scaled into [0, 1].
Matrix load_idx_images(const std::filesystem::path& path);

/// Reads an IDX label file (magic 0x00000801, one dimension).
LabelVector load_idx_labels(const std::filesystem::path& path);

/// Writes `data` as an IDX image file with shape (N, rows, cols). Values are
/// quantized with round(255 * clamp(v, 0, 1)). rows*cols must equal data.cols().
void write_idx_images(const std::filesystem::path& path, const Matrix& data, std::uint32_t rows,
                      std::uint32_t cols);
void write_idx_labels(const std::filesystem::path& path, const LabelVector& labels);

/// Samples a manifold of known intrinsic dimension embedded in ambient space.
/// Output features are min-max rescaled into [0, 1]; labels index the latent
/// orthant (first min(latent_dim, 4) coordinates thresholded at 0.5).
std::pair<Matrix, LabelVector> gen_manifold(const ManifoldSpec& spec);

/// Per-epoch shuffles partitioned into full batches (a short tail is dropped).
/// Returns one index list per batch, epochs concatenated in order.
std::vector<std::vector<int>> make_batches(int n_samples, int batch_size, std::uint64_t seed,
                                           int epochs = 1);

/// Gathers the listed rows.
Matrix select_rows(const Matrix& data, const std::vector<int>& rows);

}  // namespace sae_info
