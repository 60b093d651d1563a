#include "sae_info/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <set>
#include <thread>

#include "sae_info/checkpoint.hpp"
#include "sae_info/errors.hpp"

namespace sae_info {
namespace fs = std::filesystem;
namespace {

std::string checkpoint_name(long iteration) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ckpt_%08ld.bin", iteration);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

void emit(const LogFn& log, const std::string& msg) {
  if (log) log(msg);
}

}  // namespace

TrainSummary run_training(const RunConfig& config, const fs::path& run_dir, const LogFn& log) {
  ensure_dir(run_dir / "checkpoints");
  const PreparedData data = prepare_data(config);

  TrainConfig tc = config.train;
  const long per_epoch = data.train.rows() / tc.batch_size;
  tc.snapshot_schedule = log_spaced_schedule(per_epoch * tc.epochs, config.snapshot_count);
  tc.snapshot_schedule.insert(tc.snapshot_schedule.begin(), 0);

  const SAEModel model = build_sae(config.dims, config.train.seed);
  const TrainResult result = train(model, data.train, tc, [&](int epoch, double mse) {
    if (epoch == 1 || epoch % 10 == 0 || epoch == tc.epochs)
      emit(log, "epoch " + std::to_string(epoch) + " mse " + format_double(mse));
  });

  nlohmann::json snaps = nlohmann::json::array();
  TrainSummary summary;
  summary.initial_mse = result.initial_mse;
  summary.final_mse = result.final_mse();
  for (const auto& s : result.snapshots) {
    const std::string name = checkpoint_name(s.iteration);
    save_checkpoint(run_dir / "checkpoints" / name, s, tc.tie_weights);
    snaps.push_back({{"iteration", s.iteration}, {"file", "checkpoints/" + name}, {"train_mse", s.train_mse}});
    summary.iterations.push_back(s.iteration);
  }

  const KeyValues kv = config.to_key_values();
  write_key_value_file(run_dir / "config.txt", kv);
  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["config"] = kv;
  manifest["seeds"] = {{"manifold", config.manifold.seed},
                       {"train", config.train.seed},
                       {"split", config.split_seed}};
  manifest["n_train"] = data.train.rows();
  manifest["iterations_per_epoch"] = per_epoch;
  manifest["initial_mse"] = result.initial_mse;
  manifest["final_mse"] = result.final_mse();
  manifest["snapshots"] = std::move(snaps);
  write_json(run_dir / "manifest.json", manifest);
  return summary;
}

AnalysisSummary run_analysis(const fs::path& run_dir, const LogFn& log) {
  const fs::path manifest_path = run_dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw IoError("missing " + manifest_path.string());
  const nlohmann::json manifest = read_json(manifest_path);
  KeyValues kv;
  try {
    kv = manifest.at("config").get<KeyValues>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  const RunConfig config = parse_run_config(kv);
  const PreparedData data = prepare_data(config);

  std::vector<fs::path> files;
  for (const auto& s : manifest.at("snapshots")) files.push_back(run_dir / s.at("file").get<std::string>());

  AnalysisSummary out;
  out.records.resize(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Checkpoint ck = load_checkpoint(files[i]);
    TrainingSnapshot snap{ck.iteration, ck.model, ck.train_mse};
    out.records[i] = capture(snap, data.probe, config.capture);
  }
  emit(log, "captured " + std::to_string(out.records.size()) + " records");

  out.transient_snapshots =
      static_cast<std::size_t>(std::floor(config.transient_fraction * static_cast<double>(files.size())));
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    out.reports.push_back(check_dpi(out.records[i], config.dpi_tolerance));
    if (i >= out.transient_snapshots) {
      out.post_transient_comparisons += out.reports.back().comparisons;
      out.post_transient_violations += static_cast<int>(out.reports.back().violations.size());
    }
  }

  const fs::path dir = run_dir / "analysis";
  ensure_dir(dir);
  write_records_csv(dir / "records.csv", out.records);
  write_ip_csv(dir / "ip1_encoder.csv", build_ip1(out.records, IPSide::kEncoder));
  write_ip_csv(dir / "ip1_decoder.csv", build_ip1(out.records, IPSide::kDecoder));
  write_ip_csv(dir / "ip2.csv", build_ip2(out.records));
  write_json(dir / "dpi_report.json", dpi_reports_to_json(out.reports, out.transient_snapshots));
  return out;
}

std::vector<int> with_bottleneck(std::vector<int> dims, int k) {
  validate_topology(dims);
  dims[dims.size() / 2] = k;
  return dims;
}

int default_worker_count() {
  if (const char* env = std::getenv("SAE_INFO_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepOutcome run_sweep(const RunConfig& base, std::vector<int> k_values, const fs::path& out_dir,
                       int workers, const LogFn& log) {
  SweepOutcome outcome;
  std::vector<int> unique;
  std::set<int> seen;
  for (int k : k_values) {
    if (k < 1) throw ConfigError("bottleneck width must be >= 1");
    if (!seen.insert(k).second) {
      outcome.warnings.push_back("duplicate K=" + std::to_string(k) + " ignored");
      continue;
    }
    unique.push_back(k);
  }
  if (unique.empty()) throw ConfigError("empty K list");
  std::sort(unique.begin(), unique.end());
  ensure_dir(out_dir);

  std::vector<RunConfig> configs;
  for (int k : unique) {
    RunConfig c = base;
    c.dims = with_bottleneck(base.dims, k);
    configs.push_back(c);
  }

  std::vector<std::vector<InfoRecord>> records(unique.size());
  std::vector<std::string> errors(unique.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto job = [&] {
    for (std::size_t i = next++; i < unique.size(); i = next++) {
      const fs::path dir = out_dir / ("K_" + std::to_string(unique[i]));
      try {
        run_training(configs[i], dir);
        records[i] = run_analysis(dir).records;
        std::lock_guard lock(log_mutex);
        emit(log, "K=" + std::to_string(unique[i]) + " done");
      } catch (const std::exception& e) {
        errors[i] = e.what();
        std::lock_guard lock(log_mutex);
        emit(log, "K=" + std::to_string(unique[i]) + " failed: " + e.what());
      }
    }
  };
  const int n_threads = std::clamp(workers, 1, static_cast<int>(unique.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(job);
  job();
  for (auto& t : pool) t.join();

  std::map<int, std::vector<InfoRecord>> per_k;
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t i = 0; i < unique.size(); ++i) {
    nlohmann::json entry{{"K", unique[i]}, {"run_dir", "K_" + std::to_string(unique[i])}};
    if (errors[i].empty()) {
      per_k[unique[i]] = records[i];
    } else {
      outcome.failed_k.push_back(unique[i]);
      entry["error"] = errors[i];
    }
    runs.push_back(std::move(entry));
  }
  if (!per_k.empty()) outcome.bifurcation = detect_bifurcation(per_k, base.tau, base.bifurcation_layer);
  outcome.bifurcation.tau = base.tau;

  nlohmann::json bif = bifurcation_to_json(outcome.bifurcation);
  bif["encoder_layer"] = base.bifurcation_layer;
  write_json(out_dir / "bifurcation.json", bif);
  nlohmann::json manifest;
  manifest["base_config"] = base.to_key_values();
  manifest["k_values"] = unique;
  manifest["runs"] = std::move(runs);
  manifest["warnings"] = outcome.warnings;
  write_json(out_dir / "sweep_manifest.json", manifest);
  return outcome;
}

}  // namespace sae_info
