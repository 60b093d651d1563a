#include "sae_info/sae_trainer.hpp"

#include <algorithm>
#include <cmath>

#include "sae_info/errors.hpp"

namespace sae_info {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate must be finite and >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  for (std::size_t i = 0; i < snapshot_schedule.size(); ++i) {
    if (snapshot_schedule[i] < 0) throw ConfigError("snapshot iterations must be >= 0");
    if (i > 0 && snapshot_schedule[i] <= snapshot_schedule[i - 1])
      throw ConfigError("snapshot_schedule must be strictly increasing");
  }
}

void tie_decoder_weights(SAEModel& model) {
  const std::size_t n = model.layers.size();
  for (std::size_t l = 0; l < n / 2; ++l)
    model.layers[n - 1 - l].weights = model.layers[l].weights.transpose();
}

double loss_and_gradients(const SAEModel& model, const Matrix& batch, Gradients& grads, bool tied) {
  const ActivationSet acts = forward(model, batch);
  const std::size_t n_layers = model.layers.size();
  const double scale = 1.0 / static_cast<double>(batch.size());
  const Matrix residual = acts.reconstruction() - batch;
  const double loss = residual.squaredNorm() * scale;

  grads.weights.resize(n_layers);
  grads.biases.resize(n_layers);

  Matrix delta = 2.0 * scale * residual;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Matrix& out = acts.layers[l + 1];
    if (model.layers[l].activation == Activation::kSigmoid)
      delta = (delta.array() * out.array() * (1.0 - out.array())).matrix();
    grads.weights[l] = acts.layers[l].transpose() * delta;
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) delta = delta * model.layers[l].weights.transpose();
  }

  if (tied) {
    for (std::size_t l = 0; l < n_layers / 2; ++l) {
      Matrix& dec = grads.weights[n_layers - 1 - l];
      grads.weights[l] += dec.transpose();
      dec.setZero();
    }
  }
  return loss;
}

std::vector<long> log_spaced_schedule(long total_iterations, int count) {
  std::vector<long> out;
  if (total_iterations < 1 || count < 1) return out;
  if (count == 1) return {total_iterations};
  const double log_max = std::log(static_cast<double>(total_iterations));
  for (int i = 0; i < count; ++i) {
    const long it = std::lround(std::exp(log_max * i / (count - 1)));
    const long clamped = std::clamp(it, 1L, total_iterations);
    if (out.empty() || clamped > out.back()) out.push_back(clamped);
  }
  if (out.back() != total_iterations) out.push_back(total_iterations);
  return out;
}

TrainResult train(SAEModel model, const Matrix& data, const TrainConfig& config,
                  const ProgressCallback& progress) {
  config.validate();
  model.validate();
  if (data.cols() != model.input_dim()) throw ShapeError("data width does not match input dim");
  if (!data.allFinite()) throw DataError("training data contains non-finite entries");
  if (config.tie_weights) tie_decoder_weights(model);

  const auto batches = make_batches(static_cast<int>(data.rows()), config.batch_size, config.seed,
                                    config.epochs);
  const std::size_t per_epoch = batches.size() / config.epochs;

  TrainResult result;
  result.initial_mse = reconstruction_mse(model, data);
  auto next_snapshot = config.snapshot_schedule.begin();
  auto maybe_snapshot = [&](long iteration, const SAEModel& m) {
    while (next_snapshot != config.snapshot_schedule.end() && *next_snapshot < iteration)
      ++next_snapshot;
    if (next_snapshot != config.snapshot_schedule.end() && *next_snapshot == iteration) {
      result.snapshots.push_back({iteration, m, reconstruction_mse(m, data)});
      ++next_snapshot;
    }
  };
  maybe_snapshot(0, model);

  Gradients grads;
  long iteration = 0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const Matrix batch = select_rows(data, batches[b]);
    const double loss = loss_and_gradients(model, batch, grads, config.tie_weights);
    ++iteration;
    if (!std::isfinite(loss))
      throw TrainingError("training diverged at iteration " + std::to_string(iteration), iteration);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      model.layers[l].weights -= config.learning_rate * grads.weights[l];
      if (config.train_biases) model.layers[l].bias -= config.learning_rate * grads.biases[l];
    }
    if (config.tie_weights) tie_decoder_weights(model);
    maybe_snapshot(iteration, model);

    if ((b + 1) % per_epoch == 0) {
      const double mse = reconstruction_mse(model, data);
      if (!std::isfinite(mse))
        throw TrainingError("training diverged at iteration " + std::to_string(iteration), iteration);
      result.epoch_mse.push_back(mse);
      if (progress) progress(static_cast<int>(result.epoch_mse.size()), mse);
    }
  }
  result.model = std::move(model);
  return result;
}

}  // namespace sae_info
