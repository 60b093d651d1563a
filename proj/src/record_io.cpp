#include "sae_info/record_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "sae_info/errors.hpp"

namespace sae_info {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_records_csv(const std::filesystem::path& path, const std::vector<InfoRecord>& records) {
  auto out = open_out(path);
  out << "iteration,layer_id,quantity_name,bits\n";
  auto row = [&](long it, int layer, const char* name, double bits) {
    out << it << ',' << layer << ',' << name << ',' << format_double(bits) << '\n';
  };
  auto rows = [&](long it, const char* name, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) row(it, static_cast<int>(i + 1), name, v[i]);
  };
  for (const auto& r : records) {
    rows(r.iteration, "I_X_T", r.mi_input_encoder);
    rows(r.iteration, "I_Xp_Tp", r.mi_output_decoder);
    rows(r.iteration, "I_T_Tp", r.mi_pairs);
    rows(r.iteration, "I_T_Xp", r.mi_encoder_output);
    rows(r.iteration, "I_Tp_X", r.mi_decoder_input);
    row(r.iteration, 0, "I_X_Xp", r.mi_input_output);
    row(r.iteration, r.depth(), "H_Z", r.entropy_bottleneck);
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<InfoRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "iteration,layer_id,quantity_name,bits")
    throw FormatError(path.string() + ": unexpected header");
  std::vector<InfoRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string it_s, layer_s, name, bits_s;
    if (!std::getline(ss, it_s, ',') || !std::getline(ss, layer_s, ',') ||
        !std::getline(ss, name, ',') || !std::getline(ss, bits_s))
      throw FormatError(path.string() + ": malformed line " + std::to_string(line_no));
    const long it = std::stol(it_s);
    const int layer = std::stoi(layer_s);
    double bits = 0.0;
    std::from_chars(bits_s.data(), bits_s.data() + bits_s.size(), bits);
    if (records.empty() || records.back().iteration != it) {
      records.emplace_back();
      records.back().iteration = it;
    }
    InfoRecord& r = records.back();
    auto put = [&](std::vector<double>& v) {
      if (layer < 1) throw FormatError(path.string() + ": bad layer id on line " + std::to_string(line_no));
      if (v.size() < static_cast<std::size_t>(layer)) v.resize(layer);
      v[layer - 1] = bits;
    };
    if (name == "I_X_T") put(r.mi_input_encoder);
    else if (name == "I_Xp_Tp") put(r.mi_output_decoder);
    else if (name == "I_T_Tp") put(r.mi_pairs);
    else if (name == "I_T_Xp") put(r.mi_encoder_output);
    else if (name == "I_Tp_X") put(r.mi_decoder_input);
    else if (name == "I_X_Xp") r.mi_input_output = bits;
    else if (name == "H_Z") r.entropy_bottleneck = bits;
    else throw FormatError(path.string() + ": unknown quantity '" + name + "'");
  }
  return records;
}

void write_ip_csv(const std::filesystem::path& path, const std::vector<IPTrajectory>& trajectories) {
  auto out = open_out(path);
  out << "layer_id,iteration,x_bits,y_bits\n";
  for (const auto& t : trajectories)
    for (const auto& p : t.points)
      out << t.layer_id << ',' << p.iteration << ',' << format_double(p.x_bits) << ','
          << format_double(p.y_bits) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json dpi_reports_to_json(const std::vector<DPIReport>& reports,
                                   std::size_t transient_snapshots) {
  nlohmann::json j;
  nlohmann::json items = nlohmann::json::array();
  int comparisons = 0;
  int violations = 0;
  for (std::size_t s = 0; s < reports.size(); ++s) {
    const auto& r = reports[s];
    nlohmann::json v = nlohmann::json::array();
    for (const auto& viol : r.violations)
      v.push_back({{"chain", to_string(viol.chain)},
                   {"position", viol.position},
                   {"magnitude_bits", viol.magnitude_bits}});
    const bool transient = s < transient_snapshots;
    if (!transient) {
      comparisons += r.comparisons;
      violations += static_cast<int>(r.violations.size());
    }
    items.push_back({{"iteration", r.iteration},
                     {"transient", transient},
                     {"comparisons", r.comparisons},
                     {"violations", std::move(v)}});
  }
  j["tolerance_bits"] = reports.empty() ? 0.0 : reports.front().tolerance_bits;
  j["transient_snapshots"] = transient_snapshots;
  j["post_transient_comparisons"] = comparisons;
  j["post_transient_violations"] = violations;
  j["post_transient_violation_rate"] =
      comparisons > 0 ? static_cast<double>(violations) / comparisons : 0.0;
  j["records"] = std::move(items);
  return j;
}

nlohmann::json bifurcation_to_json(const BifurcationResult& result) {
  nlohmann::json j;
  j["tau"] = result.tau;
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < result.swept_k.size(); ++i)
    entries.push_back({{"K", result.swept_k[i]}, {"bisector_distance", result.distances[i]}});
  j["per_k"] = std::move(entries);
  j["k_star"] = result.detected_k ? nlohmann::json(*result.detected_k) : nlohmann::json(nullptr);
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace sae_info
