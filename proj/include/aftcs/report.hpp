#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "aftcs/metrics.hpp"
#include "aftcs/scenario.hpp"
#include "aftcs/simulation.hpp"

namespace aftcs {

namespace detail {
inline std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << std::fixed << v;
  return os.str();
}
inline std::string fmt_opt(const std::optional<double>& v, int precision = 6) {
  return v ? fmt(*v, precision) : "nan";
}
}  // namespace detail

inline std::string metrics_csv(const MetricsReport& report, const ScenarioConfig& cfg) {
  std::string out = "sensor,period,loss_rate,avg_latency_ms,generated,delivered\n";
  for (const auto& sc : cfg.sensors) {
    for (std::size_t p = 0; p < report.periods.size(); ++p) {
      const auto& cell = report.cell(sc.spec.id, p);
      out += sc.spec.name + "," + std::to_string(p + 1) + "," +
             detail::fmt_opt(cell.loss_rate()) + "," + detail::fmt_opt(cell.avg_latency_ms(), 3) +
             "," + std::to_string(cell.generated) + "," + std::to_string(cell.delivered) + "\n";
    }
  }
  return out;
}

inline std::string priority_trace_csv(const MetricsReport& report, const ScenarioConfig& cfg) {
  std::string out = "t_s,sensor,priority\n";
  for (const auto& [t, id, level] : report.priority_trajectory)
    out += detail::fmt(t / 1000.0, 3) + "," + cfg.sensor_by_id(id).spec.name + "," +
           std::to_string(level) + "\n";
  return out;
}

inline std::string bandwidth_trace_csv(const MetricsReport& report) {
  std::string out = "t_s,bw_effective_bps\n";
  for (const auto& [t, bw] : report.bandwidth_trace)
    out += detail::fmt(t / 1000.0, 3) + "," + detail::fmt(bw, 1) + "\n";
  return out;
}

inline std::string comparison_csv(const ComparisonTable& table, const ScenarioConfig& cfg) {
  std::string out =
      "sensor,period,top_priority,loss_aftcs,loss_baseline,loss_delta,"
      "latency_aftcs_ms,latency_baseline_ms,latency_delta_ms\n";
  for (const auto& row : table.rows) {
    std::optional<double> loss_delta, lat_delta;
    if (row.loss_a && row.loss_b) loss_delta = *row.loss_a - *row.loss_b;
    if (row.latency_a_ms && row.latency_b_ms) lat_delta = *row.latency_a_ms - *row.latency_b_ms;
    out += cfg.sensor_by_id(row.sensor).spec.name + "," + std::to_string(row.period + 1) + "," +
           (row.top_priority ? "1" : "0") + "," + detail::fmt_opt(row.loss_a) + "," +
           detail::fmt_opt(row.loss_b) + "," + detail::fmt_opt(loss_delta) + "," +
           detail::fmt_opt(row.latency_a_ms, 3) + "," + detail::fmt_opt(row.latency_b_ms, 3) +
           "," + detail::fmt_opt(lat_delta, 3) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json summary_json(const RunResult& run, const MetricsReport& report,
                                           const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["scenario"] = cfg.name;
  j["scheme"] = scheme_name(run.scheme);
  j["seed"] = run.seed;
  j["config_hash"] = run.config_hash;
  j["duration_s"] = cfg.duration_s;
  j["periods"] = report.periods.size();
  nlohmann::ordered_json sensors = nlohmann::ordered_json::array();
  for (const auto& sc : cfg.sensors) {
    const auto& totals = run.totals.at(sc.spec.id);
    nlohmann::ordered_json s;
    s["name"] = sc.spec.name;
    s["generated"] = totals.generated;
    s["delivered"] = totals.delivered;
    s["dropped_channel"] = totals.dropped_channel;
    s["dropped_buffer"] = totals.dropped_buffer;
    s["dropped_retry_limit"] = totals.dropped_retry_limit;
    s["still_queued"] = totals.still_queued;
    s["conserved"] = totals.conserved();
    sensors.push_back(std::move(s));
  }
  j["sensors"] = std::move(sensors);
  return j;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::system_error(EIO, std::generic_category(), "cannot write " + path.string());
  out << content;
  if (!out) throw std::system_error(EIO, std::generic_category(), "short write " + path.string());
}

/// Writes the full artifact set for one run into `dir`.
inline void write_run_outputs(const std::filesystem::path& dir, const RunResult& run,
                              const MetricsReport& report, const ScenarioConfig& cfg) {
  std::filesystem::create_directories(dir);
  write_file(dir / "metrics.csv", metrics_csv(report, cfg));
  write_file(dir / "priority_trace.csv", priority_trace_csv(report, cfg));
  write_file(dir / "bandwidth_trace.csv", bandwidth_trace_csv(report));
  write_file(dir / "summary.json", summary_json(run, report, cfg).dump(2) + "\n");
  write_file(dir / "events.jsonl", serialize_trace(run.trace));
}

}  // namespace aftcs
