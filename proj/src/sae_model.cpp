#include "sae_info/sae_model.hpp"

#include <cmath>
#include <random>

#include "sae_info/errors.hpp"

namespace sae_info {
namespace {

void apply_activation(Matrix& z, Activation act) {
  if (act == Activation::kSigmoid) z = (1.0 + (-z.array()).exp()).inverse().matrix();
}

Matrix affine(const Matrix& in, const DenseLayer& layer) {
  Matrix z = in * layer.weights;
  z.rowwise() += layer.bias.transpose();
  apply_activation(z, layer.activation);
  return z;
}

}  // namespace

std::size_t SAEModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

void validate_topology(const std::vector<int>& dims) {
  if (dims.size() < 3) throw ConfigError("topology needs at least 3 layer widths");
  if (dims.size() % 2 == 0) throw ConfigError("topology must have an odd number of widths");
  for (int d : dims)
    if (d < 1) throw ConfigError("layer widths must be positive");
  for (std::size_t i = 0; i < dims.size() / 2; ++i)
    if (dims[i] != dims[dims.size() - 1 - i])
      throw ConfigError("topology is not a palindrome around the bottleneck");
}

void SAEModel::validate() const {
  validate_topology(dims);
  if (layers.size() != dims.size() - 1) throw ShapeError("layer count does not match topology");
  const std::size_t bottleneck = static_cast<std::size_t>(encoder_depth()) - 1;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weights.rows() != dims[l] || layer.weights.cols() != dims[l + 1] ||
        layer.bias.size() != dims[l + 1])
      throw ShapeError("parameter shapes of layer " + std::to_string(l) + " do not chain");
    const bool is_output = l + 1 == layers.size();
    if (l == bottleneck && layer.activation != Activation::kLinear)
      throw ConfigError("bottleneck layer must be linear");
    if (l != bottleneck && !is_output && layer.activation != Activation::kSigmoid)
      throw ConfigError("hidden layer " + std::to_string(l) + " must be sigmoid");
  }
}

SAEModel build_sae(const std::vector<int>& dims, std::uint64_t seed, Activation output_activation) {
  validate_topology(dims);
  SAEModel model;
  model.dims = dims;
  model.seed = seed;
  std::mt19937_64 rng(seed);
  const std::size_t n_layers = dims.size() - 1;
  const std::size_t bottleneck = n_layers / 2 - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    DenseLayer layer;
    const double r = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
    std::uniform_real_distribution<double> init(-r, r);
    layer.weights.resize(dims[l], dims[l + 1]);
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = init(rng);
    layer.bias = Vector::Zero(dims[l + 1]);
    if (l == bottleneck)
      layer.activation = Activation::kLinear;
    else if (l + 1 == n_layers)
      layer.activation = output_activation;
    else
      layer.activation = Activation::kSigmoid;
    model.layers.push_back(std::move(layer));
  }
  return model;
}

ActivationSet forward(const SAEModel& model, const Matrix& batch) {
  if (batch.cols() != model.input_dim()) {
    throw ShapeError("batch width " + std::to_string(batch.cols()) + " does not match input dim " +
                     std::to_string(model.input_dim()));
  }
  ActivationSet out;
  out.layers.reserve(model.dims.size());
  out.layers.push_back(batch);
  for (const auto& layer : model.layers) out.layers.push_back(affine(out.layers.back(), layer));
  return out;
}

Matrix reconstruct(const SAEModel& model, const Matrix& batch) {
  if (batch.cols() != model.input_dim()) throw ShapeError("batch width does not match input dim");
  Matrix cur = batch;
  for (const auto& layer : model.layers) cur = affine(cur, layer);
  return cur;
}

double mean_squared_error(const Matrix& x, const Matrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols())
    throw ShapeError("reconstruction shape differs from input");
  if (x.size() == 0) return 0.0;
  return (x - x_hat).squaredNorm() / static_cast<double>(x.size());
}

double reconstruction_mse(const SAEModel& model, const Matrix& data) {
  return mean_squared_error(data, reconstruct(model, data));
}

Eigen::MatrixXd pca_top_eigvecs(const Matrix& data, int k) {
  if (k < 1 || k > data.cols()) throw ConfigError("pca_top_eigvecs needs 1 <= k <= m");
  const Eigen::MatrixXd scatter = data.transpose() * data;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
  if (solver.info() != Eigen::Success) throw NumericalError("PCA eigendecomposition failed");
  // Eigen sorts ascending; take the trailing k columns in reverse.
  Eigen::MatrixXd out(data.cols(), k);
  for (int j = 0; j < k; ++j) out.col(j) = solver.eigenvectors().col(data.cols() - 1 - j);
  return out;
}

}  // namespace sae_info
