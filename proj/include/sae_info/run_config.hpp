#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sae_info/dataset_io.hpp"
#include "sae_info/ip_tracker.hpp"
#include "sae_info/sae_trainer.hpp"

namespace sae_info {

using KeyValues = std::map<std::string, std::string>;

enum class DataSource { kManifold, kIdx };

/// Experiment configuration. The accepted keys, their defaults and which are
/// required are documented in docs/config_format.md.
struct RunConfig {
  DataSource source = DataSource::kManifold;
  std::filesystem::path images_path;
  std::filesystem::path labels_path;
  ManifoldSpec manifold;
  std::uint64_t split_seed = 0;
  int test_size = 0;

  std::vector<int> dims;
  TrainConfig train;
  int snapshot_count = 40;

  CaptureOptions capture;
  int probe_size = 100;
  double dpi_tolerance = 0.05;
  double transient_fraction = 0.1;
  double tau = 0.1;
  int bifurcation_layer = 0;

  /// Normalized key/value form, sorted by key; what manifests embed.
  KeyValues to_key_values() const;
};

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigError with
/// the line number on malformed input.
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_value_file(const std::filesystem::path& path);
void write_key_value_file(const std::filesystem::path& path, const KeyValues& kv);

/// Builds and validates a RunConfig. Missing required keys and unknown keys
/// raise ConfigError naming the key.
RunConfig parse_run_config(const KeyValues& kv);

std::vector<int> parse_int_list(const std::string& s);

/// Training rows, a fixed probe batch and an optional labelled test split,
/// all drawn without overlap from the configured source.
struct PreparedData {
  Matrix train;
  LabelVector train_labels;
  Matrix probe;
  LabelVector probe_labels;
  Matrix test;
  LabelVector test_labels;
};

PreparedData prepare_data(const RunConfig& config);

}  // namespace sae_info
