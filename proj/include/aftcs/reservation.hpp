#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aftcs/core.hpp"
#include "aftcs/heap.hpp"

namespace aftcs {

/// Per-sensor slot assignment for one interval: D_i packets of T_i each.
struct SlotAllocation {
  SensorId sensor = 0;
  Millis t_i_ms = 0.0;
  int d_i = 0;
};

struct BandwidthLedger {
  double bw_effective_bps = 0.0;
  double bw_ideal_bps = 0.0;
  double bw_cs_control_bps = 0.0;
  double bw_sc_aware_bps = 0.0;
  double bw_sc_data_bps = 0.0;
  double bw_cs_polling_bps = 0.0;
  double b_l = 0.6;
  double b_h = 0.9;
};

inline void validate(const BandwidthLedger& l) {
  if (!(0.0 < l.b_l && l.b_l < l.b_h && l.b_h < 1.0))
    throw std::invalid_argument("thresholds must satisfy 0 < B_L < B_H < 1");
}

inline double required_bandwidth(const BandwidthLedger& l) {
  return l.bw_cs_control_bps + l.bw_sc_aware_bps + l.bw_sc_data_bps + l.bw_cs_polling_bps;
}

// Eq.-5 packet time. Returns nothing when the channel is dead (reserved
// traffic suspends for the interval).
inline std::optional<Millis> adapt_packet_time(const IntervalParams& ip, double bw_ideal_bps,
                                               double bw_effective_bps) {
  if (bw_effective_bps <= 0.0) return std::nullopt;
  return std::min(ip.t_min_pkt_ms * (bw_ideal_bps / bw_effective_bps), ip.t_max_pkt_ms);
}

// Eq.-6/7 packet count: the two ratios cancel until the packet time caps,
// then the count grows to keep the reserved goodput; delay-sensitive sensors
// never fall below k_min.
inline int adapt_packet_count(int d_i, Millis t_i_adapted_ms, const IntervalParams& ip,
                              double bw_ideal_bps, double bw_effective_bps,
                              const SensorSpec& spec) {
  const double base =
      d_i * (bw_ideal_bps / bw_effective_bps) / (t_i_adapted_ms / ip.t_min_pkt_ms);
  int count = static_cast<int>(std::floor(base));
  if (spec.high_delay_sensitivity) count = std::max(count, spec.k_min);
  return count;
}

/// A reservation as tracked by the queues: the sensor, its current priority,
/// and the effective-bandwidth share its reservation consumes.
struct ReservationEntry {
  SensorId sensor = 0;
  int priority = 0;
  double bandwidth_bps = 0.0;

  SensorSortKey key() const {
    return SensorSortKey{priority, bandwidth_bps, sensor};
  }

  friend bool operator==(const ReservationEntry&, const ReservationEntry&) = default;
};

// Q_reserved keeps the least-important reservation on top (eviction order);
// Q_removed keeps the most-important removed sensor on top (re-admission
// order). Both orders are total via the id tie-break.
struct WorstFirst {
  bool operator()(const ReservationEntry& a, const ReservationEntry& b) const {
    return a.key() < b.key();
  }
};
struct BestFirst {
  bool operator()(const ReservationEntry& a, const ReservationEntry& b) const {
    return b.key() < a.key();
  }
};

struct ReservationQueues {
  CountingHeap<ReservationEntry, WorstFirst> reserved;
  CountingHeap<ReservationEntry, BestFirst> removed;

  void set_counter(std::uint64_t* counter) {
    reserved.set_counter(counter);
    removed.set_counter(counter);
  }

  bool in_reserved(SensorId id) const {
    for (const auto& e : reserved.items())
      if (e.sensor == id) return true;
    return false;
  }
  bool in_removed(SensorId id) const {
    for (const auto& e : removed.items())
      if (e.sensor == id) return true;
    return false;
  }
  std::optional<ReservationEntry> take_from_reserved(SensorId id) {
    std::optional<ReservationEntry> out;
    for (const auto& e : reserved.items())
      if (e.sensor == id) out = e;
    if (out) reserved.erase_first([&](const ReservationEntry& e) { return e.sensor == id; });
    return out;
  }
  std::optional<ReservationEntry> take_from_removed(SensorId id) {
    std::optional<ReservationEntry> out;
    for (const auto& e : removed.items())
      if (e.sensor == id) out = e;
    if (out) removed.erase_first([&](const ReservationEntry& e) { return e.sensor == id; });
    return out;
  }
  double reserved_data_bandwidth() const {
    double sum = 0.0;
    for (const auto& e : reserved.items()) sum += e.bandwidth_bps;
    return sum;
  }
};

enum class AdmitDecision { accepted, rejected };
enum class AdmitBand { band1, band2, band3 };

struct AdmitResult {
  ReservationQueues queues;
  AdmitDecision decision = AdmitDecision::rejected;
  AdmitBand band = AdmitBand::band1;
  std::vector<ReservationEntry> evicted;
  double eviction_sum_bps = 0.0;
};

// Three-band reservation control. Band 1 accepts outright; band 2 accepts
// when the candidate is not worse than the least-important incumbent (ties
// resolved by the smaller bandwidth need); band 3 accepts only if evicting
// strictly-lower-priority incumbents can cover the overshoot, walking them
// in eviction order. A failed walk evicts nothing.
inline AdmitResult admit(ReservationQueues q, const ReservationEntry& s_add,
                         double bw_effective_bps, double bw_required_incl_new_bps, double b_l,
                         double b_h) {
  AdmitResult out;
  if (bw_required_incl_new_bps <= b_l * bw_effective_bps) {
    out.band = AdmitBand::band1;
    q.reserved.push(s_add);
    out.decision = AdmitDecision::accepted;
    out.queues = std::move(q);
    return out;
  }
  if (bw_required_incl_new_bps <= b_h * bw_effective_bps) {
    out.band = AdmitBand::band2;
    bool accept = true;
    if (!q.reserved.empty()) {
      const ReservationEntry& worst = q.reserved.top();
      if (s_add.priority < worst.priority) accept = true;
      else if (s_add.priority > worst.priority) accept = false;
      else accept = s_add.bandwidth_bps <= worst.bandwidth_bps;
    }
    if (accept) {
      q.reserved.push(s_add);
      out.decision = AdmitDecision::accepted;
    } else {
      q.removed.push(s_add);
      out.decision = AdmitDecision::rejected;
    }
    out.queues = std::move(q);
    return out;
  }

  out.band = AdmitBand::band3;
  const double overshoot = bw_required_incl_new_bps - b_h * bw_effective_bps;
  auto scratch = q.reserved;
  std::vector<ReservationEntry> temp;
  double sum = 0.0;
  while (!scratch.empty() && scratch.top().priority > s_add.priority) {
    temp.push_back(scratch.pop());
    sum += temp.back().bandwidth_bps;
    if (sum >= overshoot) {
      q.reserved = std::move(scratch);
      for (auto& e : temp) q.removed.push(e);
      q.reserved.push(s_add);
      out.decision = AdmitDecision::accepted;
      out.evicted = std::move(temp);
      out.eviction_sum_bps = sum;
      out.queues = std::move(q);
      return out;
    }
  }
  q.removed.push(s_add);
  out.decision = AdmitDecision::rejected;
  out.queues = std::move(q);
  return out;
}

enum class RescanTrigger {
  priority_raised,
  reserved_priority_lowered,
  requirement_reduced,
  effective_bw_increased,
};

struct RescanContext {
  double bw_effective_bps = 0.0;
  double b_l = 0.6;
  double b_h = 0.9;
  // Total required bandwidth if `candidate` joined the current reserved set.
  std::function<double(const ReservationEntry& candidate, const ReservationQueues&)>
      bw_required_with;
};

struct RescanOutcome {
  ReservationQueues queues;
  std::vector<SensorId> readmitted;
};

// Removed sensors are retried in priority order until the first rejection.
inline RescanOutcome re_reservation_scan(ReservationQueues q, RescanTrigger,
                                         const RescanContext& ctx) {
  RescanOutcome out;
  while (!q.removed.empty()) {
    ReservationEntry cand = q.removed.pop();
    const double req = ctx.bw_required_with(cand, q);
    AdmitResult res = admit(std::move(q), cand, ctx.bw_effective_bps, req, ctx.b_l, ctx.b_h);
    q = std::move(res.queues);
    if (res.decision == AdmitDecision::rejected) break;
    out.readmitted.push_back(cand.sensor);
  }
  out.queues = std::move(q);
  return out;
}

struct ScheduledWindow {
  SensorId sensor = 0;
  Millis start_ms = 0.0;
  Millis duration_ms = 0.0;
  int packets = 0;
};

struct IntervalSchedule {
  std::vector<ScheduledWindow> reserved_windows;  // in priority-queue order
  Millis best_effort_start_ms = 0.0;
  Millis best_effort_duration_ms = 0.0;
  bool truncated = false;
  std::vector<SensorId> truncated_sensors;
};

// Lays contiguous T_i x D_i windows in queue order after the fixed overhead
// budget; anything left is best effort. Over-subscription shrinks D_i from
// the lowest-priority end.
inline IntervalSchedule build_interval_schedule(const std::vector<SensorId>& reserved_order,
                                                std::vector<SlotAllocation> allocations,
                                                const IntervalParams& ip, Millis overhead_ms) {
  IntervalSchedule plan;
  const Millis available = ip.t_interval_ms - overhead_ms;
  auto alloc_of = [&](SensorId id) -> SlotAllocation& {
    for (auto& a : allocations)
      if (a.sensor == id) return a;
    throw std::invalid_argument("missing slot allocation for reserved sensor");
  };

  double demand = 0.0;
  for (SensorId id : reserved_order) {
    const auto& a = alloc_of(id);
    demand += a.t_i_ms * a.d_i;
  }
  if (demand > available) {
    plan.truncated = true;
    for (auto it = reserved_order.rbegin(); it != reserved_order.rend() && demand > available;
         ++it) {
      auto& a = alloc_of(*it);
      const bool top_sensor = std::next(it) == reserved_order.rend();
      bool trimmed = false;
      while (a.d_i > 0 && demand > available) {
        // the highest-priority window may keep one packet in partial
        // leftover time; serving clamps it at the interval bound
        if (top_sensor && a.d_i == 1 && available > 0.0) break;
        a.d_i -= 1;
        demand -= a.t_i_ms;
        trimmed = true;
      }
      if (trimmed) plan.truncated_sensors.push_back(*it);
    }
  }

  Millis cursor = overhead_ms;
  for (SensorId id : reserved_order) {
    const auto& a = alloc_of(id);
    if (a.d_i <= 0) continue;
    plan.reserved_windows.push_back({id, cursor, a.t_i_ms * a.d_i, a.d_i});
    cursor += a.t_i_ms * a.d_i;
  }
  plan.best_effort_start_ms = cursor;
  plan.best_effort_duration_ms = std::max(0.0, ip.t_interval_ms - cursor);
  return plan;
}

}  // namespace aftcs
