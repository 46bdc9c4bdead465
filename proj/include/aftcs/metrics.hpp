#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aftcs/core.hpp"
#include "aftcs/simulation.hpp"
#include "aftcs/trace.hpp"

namespace aftcs {

struct PeriodMetrics {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  double latency_sum_ms = 0.0;

  std::optional<double> loss_rate() const {
    if (generated == 0) return std::nullopt;
    return 1.0 - static_cast<double>(delivered) / static_cast<double>(generated);
  }
  std::optional<double> avg_latency_ms() const {
    if (delivered == 0) return std::nullopt;
    return latency_sum_ms / static_cast<double>(delivered);
  }
};

struct MetricsReport {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string scheme;
  std::vector<std::pair<Millis, Millis>> periods;
  // (sensor, period index) -> data-packet metrics, attributed by enqueue time
  std::map<std::pair<SensorId, std::size_t>, PeriodMetrics> cells;
  std::vector<std::tuple<Millis, SensorId, int>> priority_trajectory;
  std::vector<std::pair<Millis, double>> bandwidth_trace;

  const PeriodMetrics& cell(SensorId sensor, std::size_t period) const {
    static const PeriodMetrics empty;
    auto it = cells.find({sensor, period});
    return it == cells.end() ? empty : it->second;
  }

  // Time-averaged current priority of a sensor across one period.
  double mean_priority(SensorId sensor, std::size_t period) const {
    if (period >= periods.size()) throw std::out_of_range("period index");
    const auto [start, end] = periods[period];
    double level = std::numeric_limits<double>::quiet_NaN();
    double weighted = 0.0;
    Millis mark = start;
    bool seen = false;
    for (const auto& [t, id, lv] : priority_trajectory) {
      if (id != sensor) continue;
      if (t <= start) {
        level = lv;
        seen = true;
        continue;
      }
      if (t >= end) break;
      if (!seen) { level = lv; seen = true; mark = t; continue; }
      weighted += level * (t - mark);
      mark = t;
      level = lv;
    }
    if (!seen) throw std::runtime_error("no priority samples for sensor in trace");
    weighted += level * (end - mark);
    return weighted / (end - start);
  }

  // Sensor holding the highest (numerically smallest mean) priority in a period.
  SensorId top_priority_sensor(std::size_t period, const std::vector<SensorId>& sensors) const {
    SensorId best = sensors.at(0);
    double best_mean = mean_priority(best, period);
    for (SensorId id : sensors) {
      const double m = mean_priority(id, period);
      if (m < best_mean) {
        best = id;
        best_mean = m;
      }
    }
    return best;
  }
};

inline std::size_t period_index_of(const std::vector<std::pair<Millis, Millis>>& periods,
                                   Millis t) {
  for (std::size_t i = 0; i < periods.size(); ++i)
    if (t >= periods[i].first && t < periods[i].second) return i;
  return periods.empty() ? 0 : periods.size() - 1;
}

inline MetricsReport compute_metrics(const std::vector<TraceEvent>& trace,
                                     const std::vector<std::pair<Millis, Millis>>& periods) {
  MetricsReport report;
  report.periods = periods;
  for (const auto& e : trace) {
    switch (e.kind) {
      case TraceKind::packet_enqueued: {
        if (e.a != static_cast<int>(PacketKind::data)) break;
        const std::size_t p = period_index_of(periods, e.t_ms);
        report.cells[{e.sensor, p}].generated += 1;
        break;
      }
      case TraceKind::packet_dropped: {
        if (e.a != static_cast<int>(PacketKind::data)) break;
        if (e.b == static_cast<int>(DropCause::buffer)) {
          // buffer drops are generated-but-never-enqueued packets
          const std::size_t p = period_index_of(periods, e.t_ms);
          report.cells[{e.sensor, p}].generated += 1;
        }
        break;
      }
      case TraceKind::packet_delivered: {
        if (e.a != static_cast<int>(PacketKind::data)) break;
        const std::size_t p = period_index_of(periods, e.x);  // enqueue-time attribution
        auto& cell = report.cells[{e.sensor, p}];
        cell.delivered += 1;
        cell.latency_sum_ms += e.y;
        break;
      }
      case TraceKind::priority_changed:
        report.priority_trajectory.emplace_back(e.t_ms, e.sensor, e.a);
        break;
      case TraceKind::bw_estimate:
        report.bandwidth_trace.emplace_back(e.t_ms, e.x);
        break;
      default:
        break;
    }
  }
  return report;
}

inline MetricsReport compute_metrics(const RunResult& run,
                                     const std::vector<std::pair<Millis, Millis>>& periods) {
  MetricsReport report = compute_metrics(run.trace, periods);
  report.config_hash = run.config_hash;
  report.seed = run.seed;
  report.scheme = scheme_name(run.scheme);
  return report;
}

struct ComparisonRow {
  SensorId sensor = 0;
  std::size_t period = 0;
  std::optional<double> loss_a, loss_b;
  std::optional<double> latency_a_ms, latency_b_ms;
  bool top_priority = false;  // sensor held the highest priority this period (report A)
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

inline ComparisonTable compare_runs(const MetricsReport& a, const MetricsReport& b,
                                    const std::vector<SensorId>& sensors) {
  if (a.config_hash != b.config_hash)
    throw std::invalid_argument("comparison refused: reports built from different scenarios");
  if (a.seed != b.seed)
    throw std::invalid_argument("comparison refused: reports built from different seeds");
  if (a.periods != b.periods)
    throw std::invalid_argument("comparison refused: period layouts differ");
  ComparisonTable table;
  for (std::size_t p = 0; p < a.periods.size(); ++p) {
    const SensorId top = a.top_priority_sensor(p, sensors);
    for (SensorId id : sensors) {
      ComparisonRow row;
      row.sensor = id;
      row.period = p;
      row.loss_a = a.cell(id, p).loss_rate();
      row.loss_b = b.cell(id, p).loss_rate();
      row.latency_a_ms = a.cell(id, p).avg_latency_ms();
      row.latency_b_ms = b.cell(id, p).avg_latency_ms();
      row.top_priority = id == top;
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace aftcs
