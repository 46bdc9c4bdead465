#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace aftcs {

using SensorId = std::uint32_t;
using Millis = double;  // simulated time, milliseconds

/// Fault-tolerant priority level. Smaller value means higher priority.
class PriorityLevel {
 public:
  PriorityLevel() = default;
  explicit PriorityLevel(int value, int max_level = kDefaultMaxLevel) : value_(value) {
    if (value < 0 || value > max_level)
      throw std::out_of_range("priority level " + std::to_string(value) + " outside [0, " +
                              std::to_string(max_level) + "]");
  }

  int value() const { return value_; }

  friend bool operator==(PriorityLevel a, PriorityLevel b) { return a.value_ == b.value_; }

  static constexpr int kDefaultMaxLevel = 6;

 private:
  int value_ = 0;
};

enum class Ordering { higher, equal, lower };

/// Compares two levels in priority sense: `higher` iff a outranks b.
inline Ordering priority_order(PriorityLevel a, PriorityLevel b) {
  if (a.value() < b.value()) return Ordering::higher;
  if (a.value() == b.value()) return Ordering::equal;
  return Ordering::lower;
}

/// True iff a strictly outranks b.
inline bool outranks(PriorityLevel a, PriorityLevel b) { return a.value() < b.value(); }

// Service-order key: priority first, then smaller reserved data bandwidth,
// then sensor id so the order is total and deterministic.
struct SensorSortKey {
  int priority = 0;
  double data_bandwidth_bps = 0.0;
  SensorId sensor = 0;

  friend auto operator<=>(const SensorSortKey&, const SensorSortKey&) = default;
};

inline SensorSortKey sensor_sort_key(SensorId sensor, PriorityLevel current,
                                     double data_bandwidth_bps) {
  return SensorSortKey{current.value(), data_bandwidth_bps, sensor};
}

/// Static description of one biosensor (Table 4 row).
struct SensorSpec {
  SensorId id = 0;
  std::string name;
  int payload_bytes = 0;            // data payload per packet
  double tx_rate_pps = 0.0;         // packets per second
  bool high_delay_sensitivity = false;
  std::vector<int> priority_set;    // sorted ascending
  int initial_priority = 0;
  int k_min = 0;                    // minimum packets per interval when delay sensitive
  double distance_m = 1.0;

  bool in_priority_set(int level) const {
    return std::find(priority_set.begin(), priority_set.end(), level) != priority_set.end();
  }
};

struct RadioProfile {
  double data_rate_bps = 250000.0;
  int max_frame_bytes = 127;
  int phy_overhead_bytes = 6;
  int mac_overhead_bytes = 13;
  double ideal_noise_floor_dbm = -100.0;
  double path_loss_exponent = 2.4;
  double tx_power_dbm = 0.0;
  double reference_loss_db = 57.5;  // path loss at 1 m, on-body absorption included
  double shadowing_sigma_db = 3.0;
  // BER model: ber(snr_db) = min(0.5, 10^-(alpha + beta * snr_db)), monotone
  // decreasing in SNR.
  double ber_alpha = 1.9;
  double ber_beta = 0.08;

  int max_payload_bytes() const { return max_frame_bytes - phy_overhead_bytes - mac_overhead_bytes; }
  double frame_airtime_ms(int payload_bytes) const {
    const int frame = payload_bytes + phy_overhead_bytes + mac_overhead_bytes;
    return 8.0 * frame / data_rate_bps * 1000.0;
  }
};

struct IntervalParams {
  Millis t_interval_ms = 100.0;
  int n_pkt = 0;           // max packets per interval on a clean channel
  int s_pkt_bytes = 0;     // data payload per packet used for the ideal-bandwidth figure
  Millis t_min_pkt_ms = 5.0;
  Millis t_max_pkt_ms = 20.0;
};

inline void validate(const IntervalParams& p) {
  if (!(0 < p.t_min_pkt_ms && p.t_min_pkt_ms <= p.t_max_pkt_ms && p.t_max_pkt_ms < p.t_interval_ms))
    throw std::invalid_argument("interval params: need 0 < t_min_pkt <= t_max_pkt < t_interval");
  if (p.n_pkt * p.t_min_pkt_ms > p.t_interval_ms)
    throw std::invalid_argument("interval params: n_pkt * t_min_pkt exceeds t_interval");
}

inline void validate(const SensorSpec& s, const RadioProfile& radio, int max_level) {
  if (s.priority_set.empty()) throw std::invalid_argument(s.name + ": empty priority set");
  for (int p : s.priority_set)
    if (p < 0 || p > max_level)
      throw std::invalid_argument(s.name + ": priority " + std::to_string(p) + " out of range");
  if (!s.in_priority_set(s.initial_priority))
    throw std::invalid_argument(s.name + ": initial priority not in priority set");
  if (s.payload_bytes < 1 || s.payload_bytes > radio.max_payload_bytes())
    throw std::invalid_argument(s.name + ": payload outside [1, max frame payload]");
  if (!s.high_delay_sensitivity && s.k_min != 0)
    throw std::invalid_argument(s.name + ": k_min requires high delay sensitivity");
  if (s.k_min < 0) throw std::invalid_argument(s.name + ": negative k_min");
}

}  // namespace aftcs
