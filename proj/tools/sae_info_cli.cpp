// sae-info: generate data, train stacked autoencoders, and analyze their
// layer-wise information flow.
//
// Exit codes: 0 success, 1 runtime failure, 2 validation failure.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "sae_info/errors.hpp"
#include "sae_info/experiment.hpp"
#include "sae_info/intrinsic_dim.hpp"

namespace fs = std::filesystem;
using namespace sae_info;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

void log_line(const std::string& msg) { std::cerr << msg << '\n'; }

KeyValues load_config(const std::string& path, const std::vector<std::string>& overrides) {
  KeyValues kv = read_key_value_file(path);
  for (const auto& o : overrides) {
    const KeyValues one = parse_key_values(o);
    if (one.size() != 1) throw ConfigError("--set expects key=value, got '" + o + "'");
    kv[one.begin()->first] = one.begin()->second;
  }
  return kv;
}

int cmd_gen_data(const ManifoldSpec& spec, const fs::path& out_dir, const std::string& prefix) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const auto [data, labels] = gen_manifold(spec);
  const fs::path images = out_dir / (prefix + "-images.idx");
  const fs::path label_file = out_dir / (prefix + "-labels.idx");
  write_idx_images(images, data, 1, static_cast<std::uint32_t>(spec.ambient_dim));
  write_idx_labels(label_file, labels);
  nlohmann::json side;
  side["latent_dim"] = spec.latent_dim;
  side["ambient_dim"] = spec.ambient_dim;
  side["embedding"] = to_string(spec.embedding);
  side["noise_std"] = spec.noise_std;
  side["n_samples"] = spec.n_samples;
  side["seed"] = spec.seed;
  side["n_classes"] = labels.n_classes;
  side["images"] = images.filename().string();
  side["labels"] = label_file.filename().string();
  write_json(out_dir / (prefix + ".json"), side);
  std::cout << images.string() << '\n' << label_file.string() << '\n';
  return 0;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides,
              const fs::path& out_dir) {
  const RunConfig config = parse_run_config(load_config(config_path, overrides));
  const TrainSummary s = run_training(config, out_dir, log_line);
  std::cout << "final_mse " << format_double(s.final_mse) << "\ncheckpoints " << s.iterations.size()
            << '\n';
  return 0;
}

int cmd_analyze(const fs::path& run_dir) {
  const AnalysisSummary s = run_analysis(run_dir, log_line);
  const double rate = s.post_transient_comparisons > 0
                          ? static_cast<double>(s.post_transient_violations) / s.post_transient_comparisons
                          : 0.0;
  std::cout << "records " << s.records.size() << "\npost_transient_violations "
            << s.post_transient_violations << '/' << s.post_transient_comparisons << " ("
            << format_double(rate) << ")\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::vector<int>& ks, const fs::path& out_dir, int workers) {
  const RunConfig base = parse_run_config(load_config(config_path, overrides));
  const SweepOutcome o = run_sweep(base, ks, out_dir, workers > 0 ? workers : default_worker_count(), log_line);
  for (const auto& w : o.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << bifurcation_to_json(o.bifurcation).dump(2) << '\n';
  return o.failed_k.empty() ? 0 : kExitRuntime;
}

int cmd_dim(const fs::path& data_path, int k_min, int k_max, const std::string& json_out) {
  const Matrix data = load_idx_images(data_path);
  const DimEstimate e = mle_dimension(data, k_min, k_max);
  nlohmann::json j{{"value", e.value}, {"k_min", e.k_min}, {"k_max", e.k_max},
                   {"n_used", e.n_used}, {"n_skipped", e.n_skipped}};
  if (e.n_skipped > 0) std::cerr << "warning: skipped " << e.n_skipped << " duplicate points\n";
  std::cout << "intrinsic dimension " << format_double(e.value) << " (k in [" << k_min << ", " << k_max
            << "], " << e.n_used << " points)\n";
  if (!json_out.empty()) write_json(json_out, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layer-wise information analysis of stacked autoencoders"};
  app.require_subcommand(1);

  ManifoldSpec spec;
  std::string embedding = "linear";
  std::string gen_out = ".";
  std::string gen_prefix = "manifold";
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic manifold dataset as IDX files");
  gen->add_option("--latent-dim", spec.latent_dim, "Intrinsic dimension")->required();
  gen->add_option("--ambient", spec.ambient_dim, "Ambient dimension")->required();
  gen->add_option("--n", spec.n_samples, "Number of samples")->required();
  gen->add_option("--seed", spec.seed, "RNG seed");
  gen->add_option("--embedding", embedding, "linear | sinusoidal-warp");
  gen->add_option("--noise", spec.noise_std, "Gaussian noise std before rescaling");
  gen->add_option("--out-dir", gen_out, "Output directory");
  gen->add_option("--prefix", gen_prefix, "Output file prefix");

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  auto* tr = app.add_subcommand("train", "Train an SAE and write checkpoints + manifest");
  tr->add_option("--config", config_path, "Key/value config file")->required();
  tr->add_option("--out", out_dir, "Run directory")->required();
  tr->add_option("--set", overrides, "Override a config key (key=value)");

  std::string run_dir;
  auto* an = app.add_subcommand("analyze", "Compute information records, IP curves and DPI report");
  an->add_option("--run", run_dir, "Run directory written by train")->required();

  std::string k_list;
  int workers = 0;
  auto* sw = app.add_subcommand("sweep", "Train/analyze across bottleneck widths and locate K*");
  sw->add_option("--config", config_path, "Base config file")->required();
  sw->add_option("--k", k_list, "Comma-separated bottleneck widths")->required();
  sw->add_option("--out", out_dir, "Sweep output directory")->required();
  sw->add_option("--workers", workers, "Parallel jobs (default: SAE_INFO_WORKERS or core count)");
  sw->add_option("--set", overrides, "Override a config key (key=value)");

  std::string data_path;
  std::string json_out;
  int k_min = 10;
  int k_max = 20;
  auto* dm = app.add_subcommand("dim", "Maximum-likelihood intrinsic dimension of an IDX image file");
  dm->add_option("--data", data_path, "IDX image file")->required();
  dm->add_option("--k-min", k_min, "Smallest neighbour count");
  dm->add_option("--k-max", k_max, "Largest neighbour count");
  dm->add_option("--json", json_out, "Also write the estimate as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*gen) {
      spec.embedding = embedding_from_string(embedding);
      return cmd_gen_data(spec, gen_out, gen_prefix);
    }
    if (*tr) return cmd_train(config_path, overrides, out_dir);
    if (*an) return cmd_analyze(run_dir);
    if (*sw) return cmd_sweep(config_path, overrides, parse_int_list(k_list), out_dir, workers);
    if (*dm) return cmd_dim(data_path, k_min, k_max, json_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
