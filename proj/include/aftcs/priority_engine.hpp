#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aftcs/core.hpp"

namespace aftcs {

/// Dynamic priority machinery for one sensor: the current level, one tuner
/// per candidate level, and the acquiescence hold that follows an activation.
struct PriorityState {
  SensorId sensor = 0;
  PriorityLevel current;
  std::map<int, double> tuners;       // m_ip, one entry per priority-set member
  Millis activation_time_ms = 0.0;    // when `current` was last activated
  std::map<int, Millis> lambda_ms;    // acquiescence duration per level
  double theta = 0.4;                 // system-wide activation threshold

  static PriorityState initial(const SensorSpec& spec, double theta, Millis default_lambda_ms,
                               Millis t0 = 0.0) {
    PriorityState st;
    st.sensor = spec.id;
    st.current = PriorityLevel(spec.initial_priority);
    st.theta = theta;
    st.activation_time_ms = t0;
    for (int p : spec.priority_set) {
      st.tuners[p] = 0.0;
      st.lambda_ms[p] = default_lambda_ms;
    }
    return st;
  }
};

// acquiescence_ip(t) for p = current: 1 while the hold window after the last
// activation is still running, 0 once the level has been held for lambda.
inline int acquiescence(const PriorityState& state, PriorityLevel p, Millis t) {
  auto it = state.lambda_ms.find(p.value());
  const Millis lambda = it == state.lambda_ms.end() ? 0.0 : it->second;
  return (t - state.activation_time_ms) < lambda ? 1 : 0;
}

// One tick of the tuner recurrence. During the hold all tuners are pinned to
// zero; afterwards every tuner accumulates its adjustment factor, unclamped
// in both directions.
inline PriorityState step_tuners(PriorityState state, const std::map<int, double>& deltas,
                                 Millis t) {
  if (acquiescence(state, state.current, t) == 1) {
    for (auto& [level, m] : state.tuners) m = 0.0;
    return state;
  }
  for (auto& [level, m] : state.tuners) {
    auto it = deltas.find(level);
    if (it != deltas.end()) m += it->second;
  }
  return state;
}

// Activates the highest-priority non-current level whose tuner reached theta,
// if any. An activation resets every tuner and restarts the hold window.
inline std::pair<PriorityState, std::optional<PriorityLevel>> try_activate(PriorityState state,
                                                                           Millis t) {
  std::optional<int> winner;
  for (const auto& [level, m] : state.tuners) {
    if (level == state.current.value()) continue;
    if (m >= state.theta && (!winner || level < *winner)) winner = level;
  }
  if (!winner) return {std::move(state), std::nullopt};
  state.current = PriorityLevel(*winner);
  state.activation_time_ms = t;
  for (auto& [level, m] : state.tuners) m = 0.0;
  return {std::move(state), PriorityLevel(*winner)};
}

// Service order of the fault-tolerant priority queue (Q): priority first,
// bandwidth tie-break, then id.
inline std::vector<SensorId> build_priority_queue(
    const std::vector<PriorityState>& states, const std::map<SensorId, double>& bandwidth_bps) {
  std::vector<std::pair<SensorSortKey, SensorId>> keyed;
  keyed.reserve(states.size());
  for (const auto& st : states) {
    auto it = bandwidth_bps.find(st.sensor);
    const double bw = it == bandwidth_bps.end() ? 0.0 : it->second;
    keyed.emplace_back(sensor_sort_key(st.sensor, st.current, bw), st.sensor);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<SensorId> order;
  order.reserve(keyed.size());
  for (const auto& [key, id] : keyed) order.push_back(id);
  return order;
}

}  // namespace aftcs
