#pragma once

#include <cmath>
#include <map>
#include <stdexcept>

#include "aftcs/core.hpp"
#include "aftcs/rng.hpp"

namespace aftcs {

/// Channel state for one instant: the scheduled noise floor plus the static
/// radio geometry. Shadowing draws are taken per (sensor, interval).
struct ChannelState {
  RadioProfile radio;
  double noise_floor_dbm = -100.0;
  std::map<SensorId, double> distance_m;
  std::uint64_t rng_seed = 0;

  double distance_of(SensorId id) const {
    auto it = distance_m.find(id);
    return it == distance_m.end() ? 1.0 : it->second;
  }
};

inline void validate(const ChannelState& ch) {
  if (ch.noise_floor_dbm < ch.radio.ideal_noise_floor_dbm)
    throw std::invalid_argument("noise floor below the ideal floor");
  for (const auto& [id, d] : ch.distance_m)
    if (d <= 0.0) throw std::invalid_argument("sensor distance must be positive");
}

inline double snr_db(const ChannelState& ch, SensorId sensor, double shadow_db) {
  const double d = ch.distance_of(sensor);
  if (d <= 0.0) throw std::invalid_argument("sensor distance must be positive");
  const double path_loss = ch.radio.reference_loss_db +
                           10.0 * ch.radio.path_loss_exponent * std::log10(d) + shadow_db;
  return ch.radio.tx_power_dbm - path_loss - ch.noise_floor_dbm;
}

// Power-law bit error curve, monotone decreasing in SNR and clamped at 0.5.
inline double bit_error_rate(const RadioProfile& radio, double snr_db_value) {
  return std::min(0.5, std::pow(10.0, -(radio.ber_alpha + radio.ber_beta * snr_db_value)));
}

inline double packet_error_probability(const ChannelState& ch, SensorId sensor, int frame_bytes,
                                       double shadow_db) {
  if (frame_bytes <= 0) return 0.0;
  if (frame_bytes > ch.radio.max_frame_bytes)
    throw std::invalid_argument("frame exceeds the maximum physical frame size");
  const double ber = bit_error_rate(ch.radio, snr_db(ch, sensor, shadow_db));
  return 1.0 - std::pow(1.0 - ber, 8.0 * frame_bytes);
}

// Shadowing draw for one (sensor, interval), deterministic in the seed.
inline double shadow_draw_db(const ChannelState& ch, SensorId sensor,
                             std::uint64_t interval_index) {
  if (ch.radio.shadowing_sigma_db <= 0.0) return 0.0;
  return ch.radio.shadowing_sigma_db *
         rng::draw_normal(ch.rng_seed, rng::Stream::shadowing, sensor, interval_index);
}

}  // namespace aftcs
