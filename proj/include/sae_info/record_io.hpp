#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sae_info/ip_tracker.hpp"

namespace sae_info {

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Long-format record table: iteration,layer_id,quantity_name,bits.
/// Quantity names and their layer ids are listed in docs/output_formats.md.
void write_records_csv(const std::filesystem::path& path, const std::vector<InfoRecord>& records);
std::vector<InfoRecord> read_records_csv(const std::filesystem::path& path);

/// layer_id,iteration,x_bits,y_bits
void write_ip_csv(const std::filesystem::path& path, const std::vector<IPTrajectory>& trajectories);

nlohmann::json dpi_reports_to_json(const std::vector<DPIReport>& reports,
                                   std::size_t transient_snapshots);
nlohmann::json bifurcation_to_json(const BifurcationResult& result);

/// Writes `j.dump(2)` followed by a newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace sae_info
