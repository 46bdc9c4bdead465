#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aftcs/core.hpp"

namespace aftcs {

enum class FaultKind { bio, environmental, runtime };

/// One observed fault-related reading (body data, environment, or node state).
struct FaultInfo {
  FaultKind kind = FaultKind::bio;
  std::string channel_name;
  double value = 0.0;
  Millis timestamp_ms = 0.0;
};

enum class Favorability { favorable, unfavorable, neutral };

// A channel's category partition: ordered upper bounds, e.g. temperature
// {36.0 -> "low", 37.4 -> "normal", +inf -> "high"}. The category of a value
// is the first band whose upper bound is >= value.
struct CategoryPartition {
  std::vector<std::pair<double, std::string>> bands;  // (upper bound, category), ascending

  const std::string& category_of(double value) const {
    for (const auto& [bound, name] : bands)
      if (value <= bound) return name;
    if (bands.empty()) throw std::invalid_argument("empty category partition");
    return bands.back().second;
  }
};

/// Per-sensor favorability rules: how each fault-info channel's reading
/// category impacts each member of the sensor's priority set.
struct FavorabilityTable {
  struct ChannelRule {
    CategoryPartition partition;
    double w_favorable = 0.1;    // per-tick weight toward a level
    double w_unfavorable = 0.1;  // per-tick weight away from a level
    // category -> level -> favorable/unfavorable; missing entries are neutral
    std::map<std::string, std::map<int, Favorability>> impact;
  };

  std::map<std::string, ChannelRule> channels;  // keyed by channel_name

  bool has_channel(const std::string& name) const { return channels.count(name) > 0; }
};

inline Favorability classify_reading(const FavorabilityTable& table, const FaultInfo& info,
                                     PriorityLevel p) {
  auto it = table.channels.find(info.channel_name);
  if (it == table.channels.end())
    throw std::invalid_argument("unconfigured fault-info channel: " + info.channel_name);
  const auto& rule = it->second;
  const std::string& category = rule.partition.category_of(info.value);
  auto cat_it = rule.impact.find(category);
  if (cat_it == rule.impact.end()) return Favorability::neutral;
  auto lvl_it = cat_it->second.find(p.value());
  if (lvl_it == cat_it->second.end()) return Favorability::neutral;
  return lvl_it->second;
}

/// One tick's classification of one channel for one priority, with the
/// channel's weights attached.
struct WeightedClassification {
  Favorability favorability = Favorability::neutral;
  double w_favorable = 0.1;
  double w_unfavorable = 0.1;
};

// delta_ip(t): signed sum of the tick's classifications. May be negative.
inline double adjustment_factor(const std::vector<WeightedClassification>& classifications) {
  double delta = 0.0;
  for (const auto& c : classifications) {
    if (c.favorability == Favorability::favorable) delta += c.w_favorable;
    else if (c.favorability == Favorability::unfavorable) delta -= c.w_unfavorable;
  }
  return delta;
}

}  // namespace aftcs
