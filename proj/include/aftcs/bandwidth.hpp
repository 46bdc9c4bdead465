#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aftcs/core.hpp"

namespace aftcs {

/// One VMAC polling exchange as seen by the control node.
struct PollExchange {
  SensorId sensor = 0;
  int size_pkt_bytes = 0;          // data payload of a data packet
  int size_polling_pkt_bytes = 0;  // polling packet payload
  Millis t_wait_ms = 0.0;          // actual wait time
  int n_received = 0;              // data packets successfully received
  Millis t_i_ms = 0.0;
  int d_i = 0;
  Millis t_max_pkt_ms = 0.0;
};

struct BandwidthSample {
  double bw_effective_bps = 0.0;
  Millis timestamp_ms = 0.0;
  bool poll_lost = false;
};

// Effective bandwidth from one exchange. Bytes are converted to bits so the
// result is directly comparable with the ideal-bandwidth figure.
inline BandwidthSample measure_effective_bandwidth(const PollExchange& x, Millis now_ms = 0.0) {
  if (x.t_wait_ms <= 0.0) throw std::invalid_argument("poll exchange with non-positive wait time");
  BandwidthSample s;
  s.timestamp_ms = now_ms;
  s.bw_effective_bps =
      8.0 * (static_cast<double>(x.size_pkt_bytes) * x.n_received + x.size_polling_pkt_bytes) /
      (x.t_wait_ms / 1000.0);
  s.poll_lost = x.n_received == 0 && x.t_wait_ms == x.t_i_ms * x.d_i + x.t_max_pkt_ms;
  return s;
}

inline double ideal_bandwidth(const IntervalParams& p) {
  return static_cast<double>(p.n_pkt) * p.s_pkt_bytes * 8.0 / (p.t_interval_ms / 1000.0);
}

struct SmoothingWindow {
  double alpha = 0.5;
};

// EWMA over the sample history; a lost poll contributes 0.
inline double smooth_samples(const std::vector<BandwidthSample>& history,
                             const SmoothingWindow& window) {
  if (history.empty()) throw std::invalid_argument("no bandwidth samples to smooth");
  double est = history.front().poll_lost ? 0.0 : history.front().bw_effective_bps;
  for (std::size_t i = 1; i < history.size(); ++i) {
    const double v = history[i].poll_lost ? 0.0 : history[i].bw_effective_bps;
    est = window.alpha * v + (1.0 - window.alpha) * est;
  }
  return est;
}

/// Streaming estimator the control node runs: an EWMA of per-exchange
/// delivery ratios (plus the Eq.-style byte-rate figure for the trace), and
/// an EWMA of observed poll-exchange durations per sensor for scheduling.
class BandwidthEstimator {
 public:
  BandwidthEstimator(double bw_ideal_bps, double alpha, Millis t_min_pkt_ms)
      : bw_ideal_bps_(bw_ideal_bps), alpha_(alpha), t_min_pkt_ms_(t_min_pkt_ms) {}

  // ratio sample: fraction of probe slots that delivered (0 for a lost poll).
  void add_ratio_sample(double ratio) {
    window_sum_ += std::min(1.0, std::max(0.0, ratio));
    window_count_ += 1;
  }

  // Folds the samples gathered since the previous roll into the estimate.
  // Smoothing at tick granularity keeps single lost polls from whipsawing
  // the bands. Returns the raw window mean.
  double roll_tick() {
    if (window_count_ > 0) {
      last_window_mean_ = window_sum_ / window_count_;
      window_sum_ = 0.0;
      window_count_ = 0;
      eta_ = initialized_ ? alpha_ * last_window_mean_ + (1.0 - alpha_) * eta_
                          : last_window_mean_;
      initialized_ = true;
    }
    return last_window_mean_;
  }

  double eta() const { return initialized_ ? eta_ : 1.0; }
  double bw_effective_bps() const { return eta() * bw_ideal_bps_; }
  double bw_ideal_bps() const { return bw_ideal_bps_; }

  // bw_ideal / bw_effective, clamped to [1, cap]; cap mirrors the Eq. 5
  // packet-time ceiling.
  double degradation_ratio(double cap) const {
    const double e = eta();
    if (e <= 0.0) return cap;
    return std::min(cap, std::max(1.0, 1.0 / e));
  }

 private:
  double bw_ideal_bps_;
  double alpha_;
  Millis t_min_pkt_ms_;
  double eta_ = 1.0;
  bool initialized_ = false;
  double window_sum_ = 0.0;
  std::uint64_t window_count_ = 0;
  double last_window_mean_ = 1.0;
};

}  // namespace aftcs
