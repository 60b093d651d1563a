#include "sae_info/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sae_info/errors.hpp"
#include "sae_info/record_io.hpp"

namespace sae_info {
namespace {

const std::set<std::string> kRequired = {"data.source", "model.dims", "train.epochs"};
const std::set<std::string> kKnown = {
    "data.source",        "data.images",          "data.labels",
    "data.split_seed",    "data.test_size",       "manifold.latent_dim",
    "manifold.ambient_dim", "manifold.embedding", "manifold.noise_std",
    "manifold.n_samples", "manifold.seed",        "model.dims",
    "train.learning_rate", "train.epochs",        "train.batch_size",
    "train.seed",         "train.snapshots",      "train.tie_weights",
    "kernel.h",           "kernel.sigma",         "analysis.alpha",
    "analysis.probe_size", "analysis.dpi_tolerance", "analysis.transient_fraction",
    "analysis.tau",       "analysis.bifurcation_layer"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  T out{};
  ss >> out;
  if (ss.fail() || !ss.eof()) throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

}  // namespace

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in integer list '" + s + "'");
    out.push_back(parse_number<int>("list", item));
  }
  return out;
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void write_key_value_file(const std::filesystem::path& path, const KeyValues& kv) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

RunConfig parse_run_config(const KeyValues& kv) {
  for (const auto& key : kRequired)
    if (!kv.contains(key)) throw ConfigError("missing required config key '" + key + "'");
  for (const auto& [key, value] : kv)
    if (!kKnown.contains(key)) throw ConfigError("unknown config key '" + key + "'");

  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  RunConfig c;
  const std::string& source = kv.at("data.source");
  if (source == "manifold") {
    c.source = DataSource::kManifold;
  } else if (source == "idx") {
    c.source = DataSource::kIdx;
    const auto* images = get("data.images");
    if (!images) throw ConfigError("missing required config key 'data.images'");
    c.images_path = *images;
    if (const auto* labels = get("data.labels")) c.labels_path = *labels;
  } else {
    throw ConfigError("config key 'data.source': expected manifold or idx, got '" + source + "'");
  }
  if (const auto* v = get("data.split_seed")) c.split_seed = parse_number<std::uint64_t>("data.split_seed", *v);
  if (const auto* v = get("data.test_size")) c.test_size = parse_number<int>("data.test_size", *v);

  if (const auto* v = get("manifold.latent_dim")) c.manifold.latent_dim = parse_number<int>("manifold.latent_dim", *v);
  if (const auto* v = get("manifold.ambient_dim")) c.manifold.ambient_dim = parse_number<int>("manifold.ambient_dim", *v);
  if (const auto* v = get("manifold.embedding")) c.manifold.embedding = embedding_from_string(*v);
  if (const auto* v = get("manifold.noise_std")) c.manifold.noise_std = parse_number<double>("manifold.noise_std", *v);
  if (const auto* v = get("manifold.n_samples")) c.manifold.n_samples = parse_number<int>("manifold.n_samples", *v);
  if (const auto* v = get("manifold.seed")) c.manifold.seed = parse_number<std::uint64_t>("manifold.seed", *v);
  if (c.source == DataSource::kManifold) c.manifold.validate();

  c.dims = parse_int_list(kv.at("model.dims"));
  validate_topology(c.dims);
  if (c.source == DataSource::kManifold && c.dims.front() != c.manifold.ambient_dim)
    throw ConfigError("model.dims input width must equal manifold.ambient_dim");

  c.train.epochs = parse_number<int>("train.epochs", kv.at("train.epochs"));
  if (const auto* v = get("train.learning_rate")) c.train.learning_rate = parse_number<double>("train.learning_rate", *v);
  if (const auto* v = get("train.batch_size")) c.train.batch_size = parse_number<int>("train.batch_size", *v);
  if (const auto* v = get("train.seed")) c.train.seed = parse_number<std::uint64_t>("train.seed", *v);
  if (const auto* v = get("train.snapshots")) c.snapshot_count = parse_number<int>("train.snapshots", *v);
  if (const auto* v = get("train.tie_weights")) c.train.tie_weights = parse_bool("train.tie_weights", *v);
  if (c.snapshot_count < 1) throw ConfigError("config key 'train.snapshots' must be >= 1");
  c.train.validate();

  if (const auto* v = get("kernel.h")) c.capture.kernel.h = parse_number<double>("kernel.h", *v);
  if (const auto* v = get("kernel.sigma")) c.capture.kernel.sigma_override = parse_number<double>("kernel.sigma", *v);
  c.capture.kernel.validate();
  if (const auto* v = get("analysis.alpha")) c.capture.alpha = parse_number<double>("analysis.alpha", *v);
  if (!(c.capture.alpha > 0.0) || c.capture.alpha == 1.0)
    throw ConfigError("config key 'analysis.alpha' must be > 0 and != 1");
  if (const auto* v = get("analysis.probe_size")) c.probe_size = parse_number<int>("analysis.probe_size", *v);
  if (c.probe_size < 2) throw ConfigError("config key 'analysis.probe_size' must be >= 2");
  if (const auto* v = get("analysis.dpi_tolerance")) c.dpi_tolerance = parse_number<double>("analysis.dpi_tolerance", *v);
  if (const auto* v = get("analysis.transient_fraction"))
    c.transient_fraction = parse_number<double>("analysis.transient_fraction", *v);
  if (c.transient_fraction < 0.0 || c.transient_fraction >= 1.0)
    throw ConfigError("config key 'analysis.transient_fraction' must be in [0, 1)");
  if (const auto* v = get("analysis.tau")) c.tau = parse_number<double>("analysis.tau", *v);
  if (const auto* v = get("analysis.bifurcation_layer"))
    c.bifurcation_layer = parse_number<int>("analysis.bifurcation_layer", *v);
  if (c.bifurcation_layer < 0 || c.bifurcation_layer > static_cast<int>(c.dims.size() - 1) / 2)
    throw ConfigError("config key 'analysis.bifurcation_layer' out of range");
  if (c.test_size < 0) throw ConfigError("config key 'data.test_size' must be >= 0");
  return c;
}

KeyValues RunConfig::to_key_values() const {
  KeyValues kv;
  kv["data.source"] = source == DataSource::kManifold ? "manifold" : "idx";
  if (source == DataSource::kIdx) {
    kv["data.images"] = images_path.string();
    if (!labels_path.empty()) kv["data.labels"] = labels_path.string();
  } else {
    kv["manifold.latent_dim"] = std::to_string(manifold.latent_dim);
    kv["manifold.ambient_dim"] = std::to_string(manifold.ambient_dim);
    kv["manifold.embedding"] = to_string(manifold.embedding);
    kv["manifold.noise_std"] = format_double(manifold.noise_std);
    kv["manifold.n_samples"] = std::to_string(manifold.n_samples);
    kv["manifold.seed"] = std::to_string(manifold.seed);
  }
  kv["data.split_seed"] = std::to_string(split_seed);
  kv["data.test_size"] = std::to_string(test_size);
  std::string dims_s;
  for (std::size_t i = 0; i < dims.size(); ++i) dims_s += (i ? "," : "") + std::to_string(dims[i]);
  kv["model.dims"] = dims_s;
  kv["train.learning_rate"] = format_double(train.learning_rate);
  kv["train.epochs"] = std::to_string(train.epochs);
  kv["train.batch_size"] = std::to_string(train.batch_size);
  kv["train.seed"] = std::to_string(train.seed);
  kv["train.snapshots"] = std::to_string(snapshot_count);
  kv["train.tie_weights"] = train.tie_weights ? "true" : "false";
  kv["kernel.h"] = format_double(capture.kernel.h);
  if (capture.kernel.sigma_override) kv["kernel.sigma"] = format_double(*capture.kernel.sigma_override);
  kv["analysis.alpha"] = format_double(capture.alpha);
  kv["analysis.probe_size"] = std::to_string(probe_size);
  kv["analysis.dpi_tolerance"] = format_double(dpi_tolerance);
  kv["analysis.transient_fraction"] = format_double(transient_fraction);
  kv["analysis.tau"] = format_double(tau);
  kv["analysis.bifurcation_layer"] = std::to_string(bifurcation_layer);
  return kv;
}

PreparedData prepare_data(const RunConfig& config) {
  Matrix all;
  LabelVector labels;
  if (config.source == DataSource::kManifold) {
    std::tie(all, labels) = gen_manifold(config.manifold);
  } else {
    all = load_idx_images(config.images_path);
    if (!config.labels_path.empty()) labels = load_idx_labels(config.labels_path);
    if (!labels.labels.empty() && labels.labels.size() != static_cast<std::size_t>(all.rows()))
      throw DataError("image and label counts differ");
  }
  if (all.cols() != config.dims.front())
    throw ConfigError("data width " + std::to_string(all.cols()) + " does not match model input " +
                      std::to_string(config.dims.front()));
  const int n = static_cast<int>(all.rows());
  const int held = config.probe_size + config.test_size;
  if (held + config.train.batch_size > n)
    throw ConfigError("not enough samples for probe, test split and one training batch");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(config.split_seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  auto take = [&](int begin, int end, Matrix& x, LabelVector& y) {
    const std::vector<int> rows(perm.begin() + begin, perm.begin() + end);
    x = select_rows(all, rows);
    y.n_classes = labels.n_classes;
    if (!labels.labels.empty())
      for (int r : rows) y.labels.push_back(labels.labels[r]);
  };
  PreparedData d;
  take(0, config.probe_size, d.probe, d.probe_labels);
  take(config.probe_size, held, d.test, d.test_labels);
  take(held, n, d.train, d.train_labels);
  return d;
}

}  // namespace sae_info
