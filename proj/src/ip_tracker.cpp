#include "sae_info/ip_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <utility>

#include "sae_info/errors.hpp"

namespace sae_info {
namespace {

constexpr double kDistanceEps = 1e-9;

std::string layer_name(int layer, int n_layers) {
  if (layer == 0) return "X";
  if (layer == n_layers - 1) return "X'";
  const int depth = (n_layers - 1) / 2;
  if (layer == depth) return "Z";
  if (layer < depth) return "T" + std::to_string(layer);
  return "T'" + std::to_string(n_layers - 1 - layer);
}

}  // namespace

const char* to_string(DPIChain chain) {
  switch (chain) {
    case DPIChain::kEncoder: return "encoder";
    case DPIChain::kDecoder: return "decoder";
    case DPIChain::kPairwise: return "pairwise";
  }
  return "?";
}

InfoRecord capture_activations(const ActivationSet& acts, long iteration,
                               const CaptureOptions& options) {
  options.kernel.validate();
  const int n_layers = static_cast<int>(acts.size());
  if (n_layers < 3 || n_layers % 2 == 0) throw ShapeError("activation set is not an SAE layer stack");
  const int depth = (n_layers - 1) / 2;
  const int out = n_layers - 1;
  const int n = static_cast<int>(acts.input().rows());
  if (n < 2) throw ConfigError("probe batch needs at least 2 samples");

  std::vector<std::optional<NPDMatrix>> gram(n_layers);
  std::vector<double> entropy(n_layers);
  std::vector<std::exception_ptr> errors(n_layers);
#pragma omp parallel for schedule(dynamic, 1)
  for (int l = 0; l < n_layers; ++l) {
    try {
      const Matrix& a = acts.layers[l];
      gram[l] = npd_from_batch(a, options.kernel.sigma_for(n, static_cast<int>(a.cols())));
      entropy[l] = entropy_alpha(*gram[l], options.alpha).bits;
    } catch (...) {
      errors[l] = std::current_exception();
    }
  }
  for (int l = 0; l < n_layers; ++l) {
    if (!errors[l]) continue;
    try {
      std::rethrow_exception(errors[l]);
    } catch (const std::exception& e) {
      throw NumericalError("layer " + layer_name(l, n_layers) + ": " + e.what());
    }
  }

  std::set<std::pair<int, int>> wanted;
  auto key = [](int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };
  for (int i = 1; i <= depth; ++i) {
    wanted.insert(key(0, i));
    wanted.insert(key(out, out - i));
    wanted.insert(key(i, out));
    wanted.insert(key(out - i, 0));
    if (i < depth) wanted.insert(key(i, out - i));
  }
  wanted.insert(key(0, out));

  const std::vector<std::pair<int, int>> pairs(wanted.begin(), wanted.end());
  std::vector<double> mi(pairs.size());
  std::vector<std::exception_ptr> pair_errors(pairs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    try {
      const auto [a, b] = pairs[p];
      mi[p] = entropy[a] + entropy[b] -
              joint_entropy(*gram[a], *gram[b], options.alpha).bits;
    } catch (...) {
      pair_errors[p] = std::current_exception();
    }
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (!pair_errors[p]) continue;
    try {
      std::rethrow_exception(pair_errors[p]);
    } catch (const std::exception& e) {
      throw NumericalError("layers " + layer_name(pairs[p].first, n_layers) + "/" +
                           layer_name(pairs[p].second, n_layers) + ": " + e.what());
    }
  }
  auto lookup = [&](int a, int b) {
    const auto it = std::lower_bound(pairs.begin(), pairs.end(), key(a, b));
    return mi[static_cast<std::size_t>(it - pairs.begin())];
  };

  InfoRecord r;
  r.iteration = iteration;
  r.entropy_bottleneck = entropy[depth];
  r.mi_input_output = lookup(0, out);
  for (int i = 1; i <= depth; ++i) {
    r.mi_input_encoder.push_back(lookup(0, i));
    r.mi_output_decoder.push_back(lookup(out, out - i));
    r.mi_pairs.push_back(i < depth ? lookup(i, out - i) : r.entropy_bottleneck);
    r.mi_encoder_output.push_back(lookup(i, out));
    r.mi_decoder_input.push_back(lookup(out - i, 0));
  }
  return r;
}

InfoRecord capture(const TrainingSnapshot& snapshot, const Matrix& probe,
                   const CaptureOptions& options) {
  if (probe.rows() < 2) throw ConfigError("probe batch needs at least 2 samples");
  return capture_activations(forward(snapshot.model, probe), snapshot.iteration, options);
}

std::vector<IPTrajectory> build_ip1(const std::vector<InfoRecord>& records, IPSide side) {
  std::vector<IPTrajectory> out;
  if (records.empty()) return out;
  const int depth = records.front().depth();
  for (int i = 1; i <= depth; ++i) {
    IPTrajectory t;
    t.layer_id = i;
    for (const auto& r : records) {
      if (r.depth() != depth) throw ShapeError("records do not share a layer structure");
      if (side == IPSide::kEncoder)
        t.points.push_back({r.mi_input_encoder[i - 1], r.mi_encoder_output[i - 1], r.iteration});
      else
        t.points.push_back({r.mi_output_decoder[i - 1], r.mi_decoder_input[i - 1], r.iteration});
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<IPTrajectory> build_ip2(const std::vector<InfoRecord>& records) {
  std::vector<IPTrajectory> out;
  if (records.empty()) return out;
  const int depth = records.front().depth();
  for (int i = 1; i <= depth; ++i) {
    IPTrajectory t;
    t.layer_id = i;
    for (const auto& r : records) {
      if (r.depth() != depth) throw ShapeError("records do not share a layer structure");
      t.points.push_back({r.mi_input_encoder[i - 1], r.mi_output_decoder[i - 1], r.iteration});
    }
    out.push_back(std::move(t));
  }
  return out;
}

DPIReport check_dpi(const InfoRecord& record, double tolerance_bits) {
  DPIReport report;
  report.iteration = record.iteration;
  report.tolerance_bits = tolerance_bits;
  auto scan = [&](DPIChain chain, const std::vector<double>& values) {
    for (std::size_t p = 0; p + 1 < values.size(); ++p) {
      ++report.comparisons;
      const double rise = values[p + 1] - values[p];
      if (rise > tolerance_bits)
        report.violations.push_back({chain, static_cast<int>(p), rise});
    }
  };
  scan(DPIChain::kEncoder, record.mi_input_encoder);
  scan(DPIChain::kDecoder, record.mi_output_decoder);
  std::vector<double> pairwise{record.mi_input_output};
  pairwise.insert(pairwise.end(), record.mi_pairs.begin(), record.mi_pairs.end());
  scan(DPIChain::kPairwise, pairwise);
  return report;
}

double bisector_distance(const IPPoint& p) {
  return (p.x_bits - p.y_bits) / std::max(p.x_bits, kDistanceEps);
}

std::vector<double> bisector_series(const std::vector<InfoRecord>& records, int encoder_layer) {
  std::vector<double> out;
  for (const auto& r : records) {
    const int layer = encoder_layer == 0 ? r.depth() : encoder_layer;
    if (layer < 1 || layer > r.depth()) throw ConfigError("encoder layer out of range");
    out.push_back(bisector_distance(
        {r.mi_input_encoder[layer - 1], r.mi_encoder_output[layer - 1], r.iteration}));
  }
  return out;
}

BifurcationResult detect_bifurcation(const std::map<int, std::vector<InfoRecord>>& per_k_records,
                                     double tau, int encoder_layer) {
  BifurcationResult result;
  result.tau = tau;
  for (const auto& [k, records] : per_k_records) {
    if (records.empty()) throw ConfigError("no records for K = " + std::to_string(k));
    result.swept_k.push_back(k);
    const double d = bisector_series({records.back()}, encoder_layer).front();
    result.distances.push_back(d);
    if (!result.detected_k && d < tau) result.detected_k = k;
  }
  return result;
}

std::size_t ip_knee(const std::vector<double>& distances) {
  if (distances.empty()) return 0;
  return static_cast<std::size_t>(std::min_element(distances.begin(), distances.end()) -
                                  distances.begin());
}

double softmax_probe(const Matrix& codes_train, const LabelVector& labels_train,
                     const Matrix& codes_test, const LabelVector& labels_test,
                     const SoftmaxOptions& options) {
  if (codes_train.cols() != codes_test.cols()) throw ShapeError("code widths differ");
  if (static_cast<std::size_t>(codes_train.rows()) != labels_train.labels.size() ||
      static_cast<std::size_t>(codes_test.rows()) != labels_test.labels.size())
    throw ShapeError("label count does not match code count");
  if (codes_test.rows() == 0) throw ConfigError("empty test set");
  const int n_classes = std::max(labels_train.n_classes, labels_test.n_classes);
  std::set<int> seen(labels_train.labels.begin(), labels_train.labels.end());
  if (seen.size() < 2) throw ConfigError("softmax probe needs at least two training classes");
  for (const auto* lv : {&labels_train, &labels_test})
    for (int l : lv->labels)
      if (l < 0 || l >= n_classes) throw ConfigError("label out of range");

  const Eigen::RowVectorXd mean = codes_train.colwise().mean();
  Eigen::RowVectorXd scale =
      ((codes_train.rowwise() - mean).array().square().colwise().mean()).sqrt().matrix();
  for (Eigen::Index j = 0; j < scale.size(); ++j)
    scale(j) = scale(j) > 1e-12 ? 1.0 / scale(j) : 1.0;
  auto standardize = [&](const Matrix& c) -> Matrix {
    return ((c.rowwise() - mean).array().rowwise() * scale.array()).matrix();
  };
  const Matrix xtr = standardize(codes_train);
  const Matrix xte = standardize(codes_test);

  const Eigen::Index n = xtr.rows();
  Matrix onehot = Matrix::Zero(n, n_classes);
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, labels_train.labels[i]) = 1.0;

  Matrix w = Matrix::Zero(xtr.cols(), n_classes);
  Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(n_classes);
  auto softmax_rows = [](Matrix logits) {
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      logits.row(i).array() -= logits.row(i).maxCoeff();
      logits.row(i) = logits.row(i).array().exp().matrix();
      logits.row(i) /= logits.row(i).sum();
    }
    return logits;
  };
  for (int e = 0; e < options.epochs; ++e) {
    Matrix logits = xtr * w;
    logits.rowwise() += b;
    const Matrix grad = (softmax_rows(std::move(logits)) - onehot) / static_cast<double>(n);
    w -= options.learning_rate * (xtr.transpose() * grad);
    b -= options.learning_rate * grad.colwise().sum();
  }

  Matrix scores = xte * w;
  scores.rowwise() += b;
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index arg = 0;
    scores.row(i).maxCoeff(&arg);
    if (arg == labels_test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.rows());
}

}  // namespace sae_info
