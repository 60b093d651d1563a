#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sae_info/sae_model.hpp"

namespace sae_info {

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 100;
  int batch_size = 100;
  std::uint64_t seed = 0;
  std::vector<long> snapshot_schedule;  // SGD update counts; 0 = before training
  bool tie_weights = false;
  bool train_biases = true;

  void validate() const;
};

struct TrainingSnapshot {
  long iteration = 0;
  SAEModel model;
  double train_mse = 0.0;
};

struct TrainResult {
  SAEModel model;
  std::vector<TrainingSnapshot> snapshots;
  double initial_mse = 0.0;
  std::vector<double> epoch_mse;  // full-data MSE after each epoch
  double final_mse() const { return epoch_mse.empty() ? initial_mse : epoch_mse.back(); }
};

/// Per-layer parameter gradients, same shapes as SAEModel::layers.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Loss (1/(N*m)) |X - X'|^2 on `batch` and its gradient with respect to
/// every parameter. With `tied`, the decoder weights are treated as the
/// transposes of their encoder counterparts and the combined gradient is
/// reported on the encoder layer (decoder weight entries are left zero).
double loss_and_gradients(const SAEModel& model, const Matrix& batch, Gradients& grads,
                          bool tied = false);

/// Copies the transposed encoder weights into the decoder.
void tie_decoder_weights(SAEModel& model);

/// Up to `count` distinct update counts, logarithmically spaced in [1, total].
std::vector<long> log_spaced_schedule(long total_iterations, int count);

using ProgressCallback = std::function<void(int epoch, double mse)>;

/// Minibatch SGD on mean squared reconstruction error. Throws TrainingError
/// as soon as a minibatch loss is non-finite.
TrainResult train(SAEModel model, const Matrix& data, const TrainConfig& config,
                  const ProgressCallback& progress = {});

}  // namespace sae_info
