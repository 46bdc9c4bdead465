#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aftcs/core.hpp"
#include "aftcs/fault_info.hpp"

namespace aftcs {

/// Configuration error carrying the offending field path.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), field_path(path) {}
  std::string field_path;
};

// Where a fault-info channel's values come from at runtime.
enum class ChannelSource {
  reading,             // the sensor's sampled value
  reading_volatility,  // rolling stddev of recent readings
  channel_quality,     // control node's effective/ideal bandwidth ratio
  buffer_utilization,  // occupied fraction of the sensor buffer
  battery,             // configured residual-battery curve
};

struct ReadingRegime {
  double mean = 0.0;
  double sigma = 0.0;
};

struct SensorConfig {
  SensorSpec spec;
  FavorabilityTable favorability;
  std::map<std::string, ChannelSource> channel_sources;  // keyed like favorability.channels
  std::map<std::string, ReadingRegime> regimes;          // reading regimes by name
  std::string initial_regime = "normal";
};

struct NoiseSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  double noise_floor_dbm = -100.0;
  std::map<std::string, std::string> regimes;  // sensor name -> reading regime
};

struct ScenarioConfig {
  std::string name;
  double duration_s = 0.0;
  RadioProfile radio;
  IntervalParams interval;

  // control-plane budget
  int control_packet_bytes = 10;
  double control_rate_pps = 1.0;
  int aware_packet_bytes = 16;
  double aware_rate_pps = 2.0;
  double buffer_warn = 0.8;
  double buffer_critical = 0.9;

  // polling
  int polling_payload_bytes = 10;
  int probe_packets = 2;

  double estimator_alpha = 0.3;

  double b_l = 0.6;
  double b_h = 0.9;

  // priority engine
  double theta = 0.4;
  Millis lambda_ms = 10000.0;
  Millis tick_ms = 1000.0;
  int max_level = PriorityLevel::kDefaultMaxLevel;

  int retry_limit = 3;
  std::size_t buffer_bytes = 1024 * 1024;

  std::vector<SensorConfig> sensors;
  std::vector<NoiseSegment> schedule;

  std::uint64_t config_hash = 0;

  Millis duration_ms() const { return duration_s * 1000.0; }

  const SensorConfig& sensor_by_id(SensorId id) const {
    for (const auto& s : sensors)
      if (s.spec.id == id) return s;
    throw std::invalid_argument("unknown sensor id");
  }
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

using Json = nlohmann::json;

inline const Json& member(const Json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + key, "missing required field");
  return *it;
}

template <typename T>
T get(const Json& j, const std::string& key, const std::string& path) {
  try {
    return member(j, key, path).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(path + key, std::string("bad value: ") + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

inline ChannelSource channel_source_from(const std::string& s, const std::string& path) {
  if (s == "reading") return ChannelSource::reading;
  if (s == "reading_volatility") return ChannelSource::reading_volatility;
  if (s == "channel_quality") return ChannelSource::channel_quality;
  if (s == "buffer_utilization") return ChannelSource::buffer_utilization;
  if (s == "battery") return ChannelSource::battery;
  throw ConfigError(path, "unknown channel source '" + s + "'");
}

inline FaultKind fault_kind_of(ChannelSource src) {
  switch (src) {
    case ChannelSource::reading:
    case ChannelSource::reading_volatility: return FaultKind::bio;
    case ChannelSource::channel_quality: return FaultKind::environmental;
    default: return FaultKind::runtime;
  }
}

}  // namespace detail

inline void validate(const ScenarioConfig& cfg) {
  using detail::Json;
  if (cfg.duration_s < 0) throw ConfigError("duration_s", "must be >= 0");
  validate(cfg.interval);
  if (!(0.0 < cfg.b_l && cfg.b_l < cfg.b_h && cfg.b_h < 1.0))
    throw ConfigError("reservation", "need 0 < b_low < b_high < 1");
  if (cfg.tick_ms <= 0 || std::fmod(cfg.tick_ms, cfg.interval.t_interval_ms) != 0.0)
    throw ConfigError("priority.tick_ms", "must be a positive multiple of t_interval_ms");
  if (cfg.sensors.empty()) throw ConfigError("sensors", "at least one sensor required");

  for (std::size_t i = 0; i < cfg.sensors.size(); ++i) {
    const auto& sc = cfg.sensors[i];
    const std::string path = "sensors[" + std::to_string(i) + "].";
    try {
      validate(sc.spec, cfg.radio, cfg.max_level);
    } catch (const std::exception& e) {
      throw ConfigError(path + "spec", e.what());
    }
    for (std::size_t k = i + 1; k < cfg.sensors.size(); ++k)
      if (cfg.sensors[k].spec.id == sc.spec.id)
        throw ConfigError(path + "id", "duplicate sensor id");
    if (sc.spec.distance_m <= 0.0) throw ConfigError(path + "distance_m", "must be positive");
    for (const auto& [name, rule] : sc.favorability.channels) {
      if (!sc.channel_sources.count(name))
        throw ConfigError(path + "favorability." + name, "channel has no source");
      if (rule.partition.bands.empty())
        throw ConfigError(path + "favorability." + name, "empty category partition");
      for (const auto& [cat, levels] : rule.impact) {
        bool known = false;
        for (const auto& [bound, b_name] : rule.partition.bands)
          if (b_name == cat) known = true;
        if (!known)
          throw ConfigError(path + "favorability." + name + "." + cat,
                            "impact category not in the partition");
        for (const auto& [level, fav] : levels)
          if (!sc.spec.in_priority_set(level))
            throw ConfigError(path + "favorability." + name + "." + cat,
                              "impact level " + std::to_string(level) + " not in priority set");
      }
    }
    bool has_reading_channel = false;
    for (const auto& [name, src] : sc.channel_sources)
      if (src == ChannelSource::reading || src == ChannelSource::reading_volatility)
        has_reading_channel = true;
    if (has_reading_channel && sc.regimes.empty())
      throw ConfigError(path + "regimes", "reading channels need at least one regime");
    if (!sc.regimes.empty() && !sc.regimes.count(sc.initial_regime))
      throw ConfigError(path + "initial_regime", "not a configured regime");
  }

  if (cfg.schedule.empty()) {
    if (cfg.duration_s > 0) throw ConfigError("noise_schedule", "empty schedule with nonzero duration");
  } else {
    if (cfg.schedule.front().start_s != 0.0)
      throw ConfigError("noise_schedule[0].start_s", "schedule must start at 0");
    for (std::size_t i = 0; i < cfg.schedule.size(); ++i) {
      const auto& seg = cfg.schedule[i];
      const std::string path = "noise_schedule[" + std::to_string(i) + "].";
      if (seg.end_s <= seg.start_s) throw ConfigError(path + "end_s", "must exceed start_s");
      if (seg.noise_floor_dbm < cfg.radio.ideal_noise_floor_dbm)
        throw ConfigError(path + "noise_floor_dbm", "below the ideal noise floor");
      if (i > 0 && cfg.schedule[i - 1].end_s != seg.start_s)
        throw ConfigError(path + "start_s", "segments must be contiguous");
      for (const auto& [sensor_name, regime] : seg.regimes) {
        bool found = false;
        for (const auto& sc : cfg.sensors) {
          if (sc.spec.name != sensor_name) continue;
          found = true;
          if (!sc.regimes.count(regime))
            throw ConfigError(path + "readings." + sensor_name,
                              "regime '" + regime + "' not configured for the sensor");
        }
        if (!found) throw ConfigError(path + "readings." + sensor_name, "unknown sensor");
      }
    }
    if (cfg.schedule.back().end_s < cfg.duration_s)
      throw ConfigError("noise_schedule", "schedule does not cover the full duration");
  }
}

inline ScenarioConfig load_scenario(const detail::Json& j, const std::string& raw_bytes) {
  using detail::get;
  using detail::get_or;
  using detail::member;
  ScenarioConfig cfg;
  cfg.config_hash = detail::fnv1a(raw_bytes);
  cfg.name = get_or<std::string>(j, "name", "scenario");
  cfg.duration_s = get<double>(j, "duration_s", "");

  {
    const auto& r = member(j, "radio", "");
    RadioProfile& radio = cfg.radio;
    radio.data_rate_bps = get<double>(r, "data_rate_bps", "radio.");
    radio.max_frame_bytes = get<int>(r, "max_frame_bytes", "radio.");
    radio.phy_overhead_bytes = get<int>(r, "phy_overhead_bytes", "radio.");
    radio.mac_overhead_bytes = get<int>(r, "mac_overhead_bytes", "radio.");
    radio.ideal_noise_floor_dbm = get<double>(r, "ideal_noise_floor_dbm", "radio.");
    radio.path_loss_exponent = get<double>(r, "path_loss_exponent", "radio.");
    radio.tx_power_dbm = get_or<double>(r, "tx_power_dbm", 0.0);
    radio.reference_loss_db = get_or<double>(r, "reference_loss_db", 57.5);
    radio.shadowing_sigma_db = get_or<double>(r, "shadowing_sigma_db", 3.0);
    radio.ber_alpha = get_or<double>(r, "ber_alpha", 1.9);
    radio.ber_beta = get_or<double>(r, "ber_beta", 0.08);
    if (radio.data_rate_bps <= 0) throw ConfigError("radio.data_rate_bps", "must be positive");
    if (radio.max_frame_bytes <= radio.phy_overhead_bytes + radio.mac_overhead_bytes)
      throw ConfigError("radio.max_frame_bytes", "frame smaller than its overheads");
  }

  {
    const auto& iv = member(j, "interval", "");
    cfg.interval.t_interval_ms = get<double>(iv, "t_interval_ms", "interval.");
    cfg.interval.t_min_pkt_ms = get<double>(iv, "t_min_pkt_ms", "interval.");
    cfg.interval.t_max_pkt_ms = get<double>(iv, "t_max_pkt_ms", "interval.");
    cfg.interval.s_pkt_bytes = get<int>(iv, "s_pkt_bytes", "interval.");
    cfg.interval.n_pkt = get_or<int>(
        iv, "n_pkt", static_cast<int>(cfg.interval.t_interval_ms / cfg.interval.t_min_pkt_ms));
  }

  if (j.contains("control")) {
    const auto& c = j["control"];
    cfg.control_packet_bytes = get_or<int>(c, "packet_bytes", cfg.control_packet_bytes);
    cfg.control_rate_pps = get_or<double>(c, "rate_pps", cfg.control_rate_pps);
  }
  if (j.contains("aware")) {
    const auto& a = j["aware"];
    cfg.aware_packet_bytes = get_or<int>(a, "packet_bytes", cfg.aware_packet_bytes);
    cfg.aware_rate_pps = get_or<double>(a, "rate_pps", cfg.aware_rate_pps);
    cfg.buffer_warn = get_or<double>(a, "buffer_warn", cfg.buffer_warn);
    cfg.buffer_critical = get_or<double>(a, "buffer_critical", cfg.buffer_critical);
  }
  if (j.contains("polling")) {
    const auto& p = j["polling"];
    cfg.polling_payload_bytes = get_or<int>(p, "payload_bytes", cfg.polling_payload_bytes);
    cfg.probe_packets = get_or<int>(p, "probe_packets", cfg.probe_packets);
  }
  if (j.contains("estimator"))
    cfg.estimator_alpha = get_or<double>(j["estimator"], "ewma_alpha", cfg.estimator_alpha);
  if (j.contains("reservation")) {
    const auto& r = j["reservation"];
    cfg.b_l = get_or<double>(r, "b_low", cfg.b_l);
    cfg.b_h = get_or<double>(r, "b_high", cfg.b_h);
  }
  if (j.contains("priority")) {
    const auto& p = j["priority"];
    cfg.theta = get_or<double>(p, "theta", cfg.theta);
    cfg.lambda_ms = get_or<double>(p, "lambda_ms", cfg.lambda_ms);
    cfg.tick_ms = get_or<double>(p, "tick_ms", cfg.tick_ms);
    cfg.max_level = get_or<int>(p, "max_level", cfg.max_level);
  }
  if (j.contains("arq")) cfg.retry_limit = get_or<int>(j["arq"], "retry_limit", cfg.retry_limit);
  cfg.buffer_bytes = get_or<std::uint64_t>(j, "buffer_bytes", cfg.buffer_bytes);

  const auto& sensors = member(j, "sensors", "");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const auto& sj = sensors[i];
    const std::string path = "sensors[" + std::to_string(i) + "].";
    SensorConfig sc;
    sc.spec.id = get<SensorId>(sj, "id", path);
    sc.spec.name = get<std::string>(sj, "name", path);
    sc.spec.payload_bytes = get<int>(sj, "payload_bytes", path);
    sc.spec.tx_rate_pps = get<double>(sj, "tx_rate_pps", path);
    sc.spec.high_delay_sensitivity = get<bool>(sj, "high_delay_sensitivity", path);
    sc.spec.priority_set = get<std::vector<int>>(sj, "priority_set", path);
    sc.spec.initial_priority = get<int>(sj, "initial_priority", path);
    sc.spec.k_min = get_or<int>(sj, "k_min", 0);
    sc.spec.distance_m = get_or<double>(sj, "distance_m", 1.0);
    sc.initial_regime = get_or<std::string>(sj, "initial_regime", "normal");

    if (sj.contains("regimes")) {
      for (const auto& [name, rj] : sj["regimes"].items()) {
        ReadingRegime regime;
        regime.mean = get<double>(rj, "mean", path + "regimes." + name + ".");
        regime.sigma = get<double>(rj, "sigma", path + "regimes." + name + ".");
        sc.regimes[name] = regime;
      }
    }

    if (sj.contains("favorability")) {
      for (const auto& [channel, cj] : sj["favorability"].items()) {
        const std::string cpath = path + "favorability." + channel + ".";
        FavorabilityTable::ChannelRule rule;
        sc.channel_sources[channel] =
            detail::channel_source_from(get<std::string>(cj, "source", cpath), cpath + "source");
        rule.w_favorable = get_or<double>(cj, "weight_favorable", 0.1);
        rule.w_unfavorable = get_or<double>(cj, "weight_unfavorable", 0.1);
        for (const auto& band : member(cj, "categories", cpath)) {
          rule.partition.bands.emplace_back(get<double>(band, "upto", cpath + "categories."),
                                            get<std::string>(band, "name", cpath + "categories."));
        }
        if (cj.contains("impact")) {
          for (const auto& [cat, impact] : cj["impact"].items()) {
            std::map<int, Favorability> levels;
            for (int level : get_or<std::vector<int>>(impact, "favorable", {}))
              levels[level] = Favorability::favorable;
            for (int level : get_or<std::vector<int>>(impact, "unfavorable", {}))
              levels[level] = Favorability::unfavorable;
            rule.impact[cat] = std::move(levels);
          }
        }
        sc.favorability.channels[channel] = std::move(rule);
      }
    }
    cfg.sensors.push_back(std::move(sc));
  }

  if (j.contains("noise_schedule")) {
    for (const auto& seg_j : j["noise_schedule"]) {
      NoiseSegment seg;
      seg.start_s = get<double>(seg_j, "start_s", "noise_schedule.");
      seg.end_s = get<double>(seg_j, "end_s", "noise_schedule.");
      seg.noise_floor_dbm = get<double>(seg_j, "noise_floor_dbm", "noise_schedule.");
      if (seg_j.contains("readings"))
        for (const auto& [sensor_name, regime] : seg_j["readings"].items())
          seg.regimes[sensor_name] = regime.get<std::string>();
      cfg.schedule.push_back(std::move(seg));
    }
  }

  validate(cfg);
  return cfg;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(ENOENT, std::generic_category(), "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string raw = buf.str();
  detail::Json j;
  try {
    j = detail::Json::parse(raw);
  } catch (const detail::Json::exception& e) {
    throw ConfigError("(file)", std::string("invalid JSON: ") + e.what());
  }
  return load_scenario(j, raw);
}

/// Period boundaries for metric aggregation, from the noise schedule.
inline std::vector<std::pair<Millis, Millis>> periods_of(const ScenarioConfig& cfg) {
  std::vector<std::pair<Millis, Millis>> out;
  for (const auto& seg : cfg.schedule) out.emplace_back(seg.start_s * 1000.0, seg.end_s * 1000.0);
  return out;
}

}  // namespace aftcs
