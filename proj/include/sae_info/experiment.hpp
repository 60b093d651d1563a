#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sae_info/record_io.hpp"
#include "sae_info/run_config.hpp"

namespace sae_info {

// Run directory layout (see docs/output_formats.md):
//   config.txt, manifest.json, checkpoints/ckpt_<iteration>.bin
//   analysis/records.csv, ip1_encoder.csv, ip1_decoder.csv, ip2.csv, dpi_report.json

using LogFn = std::function<void(const std::string&)>;

struct TrainSummary {
  double initial_mse = 0.0;
  double final_mse = 0.0;
  std::vector<long> iterations;
};

/// Trains per `config` and writes checkpoints plus manifest into `run_dir`.
TrainSummary run_training(const RunConfig& config, const std::filesystem::path& run_dir,
                          const LogFn& log = {});

struct AnalysisSummary {
  std::vector<InfoRecord> records;
  std::vector<DPIReport> reports;
  std::size_t transient_snapshots = 0;
  int post_transient_comparisons = 0;
  int post_transient_violations = 0;
};

/// Recomputes InfoRecords for every checkpoint listed in the manifest on the
/// configured probe batch and writes the analysis files.
AnalysisSummary run_analysis(const std::filesystem::path& run_dir, const LogFn& log = {});

/// Returns `dims` with the bottleneck width replaced by k.
std::vector<int> with_bottleneck(std::vector<int> dims, int k);

struct SweepOutcome {
  BifurcationResult bifurcation;
  std::vector<int> failed_k;
  std::vector<std::string> warnings;
};

/// Trains and analyzes one run per K under `out_dir`/K_<k>, in parallel up to
/// `workers` jobs, then writes bifurcation.json and sweep_manifest.json.
/// Duplicate K values are dropped with a warning.
SweepOutcome run_sweep(const RunConfig& base, std::vector<int> k_values,
                       const std::filesystem::path& out_dir, int workers, const LogFn& log = {});

/// Worker count from SAE_INFO_WORKERS, else the hardware concurrency.
int default_worker_count();

}  // namespace sae_info
