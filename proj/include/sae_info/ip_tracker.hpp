#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sae_info/kernel_gram.hpp"
#include "sae_info/renyi_estimator.hpp"
#include "sae_info/sae_trainer.hpp"

namespace sae_info {

/// Layer-wise information quantities (bits) for one snapshot. Vectors are
/// indexed by encoder depth i = 1..D, stored at [i-1]; depth D is the
/// bottleneck Z, so T_D and T'_D both denote Z.
struct InfoRecord {
  long iteration = 0;
  std::vector<double> mi_input_encoder;   // I(X; T_i)
  std::vector<double> mi_output_decoder;  // I(X'; T'_i)
  std::vector<double> mi_pairs;           // I(T_i; T'_i), last entry is H(Z)
  std::vector<double> mi_encoder_output;  // I(T_i; X')
  std::vector<double> mi_decoder_input;   // I(T'_i; X)
  double mi_input_output = 0.0;           // I(X; X')
  double entropy_bottleneck = 0.0;        // H(Z)

  int depth() const { return static_cast<int>(mi_input_encoder.size()); }
};

struct IPPoint {
  double x_bits = 0.0;
  double y_bits = 0.0;
  long iteration = 0;
};

struct IPTrajectory {
  int layer_id = 0;  // encoder depth i
  std::vector<IPPoint> points;
};

enum class IPSide { kEncoder, kDecoder };
enum class DPIChain { kEncoder, kDecoder, kPairwise };

const char* to_string(DPIChain chain);

struct DPIViolation {
  DPIChain chain = DPIChain::kEncoder;
  int position = 0;  // index of the earlier element of the adjacent pair
  double magnitude_bits = 0.0;
};

struct DPIReport {
  long iteration = 0;
  std::vector<DPIViolation> violations;
  double tolerance_bits = 0.0;
  int comparisons = 0;
};

struct BifurcationResult {
  std::vector<int> swept_k;
  std::vector<double> distances;  // final normalized bisector distance per K
  std::optional<int> detected_k;
  double tau = 0.0;
};

struct CaptureOptions {
  KernelConfig kernel;
  double alpha = kDefaultAlpha;
};

/// Runs the snapshot model on `probe` and estimates every InfoRecord field
/// with per-layer Silverman kernel widths.
InfoRecord capture(const TrainingSnapshot& snapshot, const Matrix& probe,
                   const CaptureOptions& options);

/// Same as capture() for an already computed activation set.
InfoRecord capture_activations(const ActivationSet& acts, long iteration,
                               const CaptureOptions& options);

/// Encoder side: (I(X;T_i), I(T_i;X')). Decoder side: (I(X';T'_i), I(T'_i;X)).
std::vector<IPTrajectory> build_ip1(const std::vector<InfoRecord>& records, IPSide side);

/// (I(X;T_i), I(X';T'_i)) for every symmetric pair, bottleneck included.
std::vector<IPTrajectory> build_ip2(const std::vector<InfoRecord>& records);

DPIReport check_dpi(const InfoRecord& record, double tolerance_bits);

/// (x - y) / max(x, eps) for an IP-I encoder point.
double bisector_distance(const IPPoint& p);

/// Bisector distance over the snapshots for one encoder depth (1-based;
/// 0 selects the bottleneck).
std::vector<double> bisector_series(const std::vector<InfoRecord>& records, int encoder_layer);

/// For each K, the final-record bisector distance of the chosen encoder
/// layer; K* is the smallest K whose distance is below tau.
BifurcationResult detect_bifurcation(const std::map<int, std::vector<InfoRecord>>& per_k_records,
                                     double tau, int encoder_layer = 0);

/// Index of the smallest bisector distance (first one on ties).
std::size_t ip_knee(const std::vector<double>& distances);

struct SoftmaxOptions {
  int epochs = 500;
  double learning_rate = 0.5;
};

/// Multinomial logistic regression on standardized codes, trained by
/// full-batch gradient descent from zero. Returns test accuracy.
double softmax_probe(const Matrix& codes_train, const LabelVector& labels_train,
                     const Matrix& codes_test, const LabelVector& labels_test,
                     const SoftmaxOptions& options = {});

}  // namespace sae_info
