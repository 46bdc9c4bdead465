#pragma once

#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aftcs/core.hpp"

namespace aftcs {

enum class TraceKind {
  packet_enqueued,
  packet_delivered,
  packet_dropped,
  poll_exchange,
  bw_estimate,
  priority_changed,
  admission,
  eviction,
  readmission,
  schedule_truncated,
};

enum class PacketKind { data = 0, aware = 1 };
enum class DropCause { channel = 0, buffer = 1, retry_limit = 2 };

/// One simulation event. The numeric payload fields are interpreted per kind;
/// serialization names them explicitly so traces stay self-describing.
struct TraceEvent {
  Millis t_ms = 0.0;
  TraceKind kind = TraceKind::packet_enqueued;
  SensorId sensor = 0;
  std::uint64_t seq = 0;  // packet sequence number where applicable
  int a = 0;              // packet kind / drop cause / priority / band / count
  int b = 0;              // decision flag / lost flag / n_received
  double x = 0.0;         // enqueue time / wait time / bandwidth / sum
  double y = 0.0;         // latency / eq4 bandwidth / required bandwidth
  double z = 0.0;         // effective bandwidth at decision time
};

namespace detail {
inline const char* kind_name(TraceKind k) {
  switch (k) {
    case TraceKind::packet_enqueued: return "packet_enqueued";
    case TraceKind::packet_delivered: return "packet_delivered";
    case TraceKind::packet_dropped: return "packet_dropped";
    case TraceKind::poll_exchange: return "poll_exchange";
    case TraceKind::bw_estimate: return "bw_estimate";
    case TraceKind::priority_changed: return "priority_changed";
    case TraceKind::admission: return "admission";
    case TraceKind::eviction: return "eviction";
    case TraceKind::readmission: return "readmission";
    case TraceKind::schedule_truncated: return "schedule_truncated";
  }
  return "unknown";
}

inline TraceKind kind_from_name(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(TraceKind::schedule_truncated); ++k)
    if (name == kind_name(static_cast<TraceKind>(k))) return static_cast<TraceKind>(k);
  throw std::invalid_argument("unknown trace event kind: " + name);
}
}  // namespace detail

inline std::string to_line(const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["t_ms"] = e.t_ms;
  j["kind"] = detail::kind_name(e.kind);
  j["sensor"] = e.sensor;
  switch (e.kind) {
    case TraceKind::packet_enqueued:
      j["seq"] = e.seq;
      j["pkt"] = e.a;
      break;
    case TraceKind::packet_delivered:
      j["seq"] = e.seq;
      j["pkt"] = e.a;
      j["enqueued_ms"] = e.x;
      j["latency_ms"] = e.y;
      break;
    case TraceKind::packet_dropped:
      j["seq"] = e.seq;
      j["pkt"] = e.a;
      j["cause"] = e.b;
      j["enqueued_ms"] = e.x;
      break;
    case TraceKind::poll_exchange:
      j["lost"] = e.b;
      j["n_received"] = e.a;
      j["t_wait_ms"] = e.x;
      j["bw_eq4_bps"] = e.y;
      break;
    case TraceKind::bw_estimate:
      j["bw_effective_bps"] = e.x;
      j["eta"] = e.y;
      break;
    case TraceKind::priority_changed:
      j["priority"] = e.a;
      break;
    case TraceKind::admission:
      j["band"] = e.a;
      j["accepted"] = e.b;
      j["sum_bps"] = e.x;
      j["required_bps"] = e.y;
      j["bw_effective_bps"] = e.z;
      break;
    case TraceKind::eviction:
    case TraceKind::readmission:
      j["priority"] = e.a;
      break;
    case TraceKind::schedule_truncated:
      j["granted"] = e.a;
      break;
  }
  return j.dump();
}

inline TraceEvent parse_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  TraceEvent e;
  e.t_ms = j.at("t_ms").get<double>();
  e.kind = detail::kind_from_name(j.at("kind").get<std::string>());
  e.sensor = j.at("sensor").get<SensorId>();
  auto opt_u64 = [&](const char* key) { return j.contains(key) ? j[key].get<std::uint64_t>() : 0; };
  auto opt_int = [&](const char* key) { return j.contains(key) ? j[key].get<int>() : 0; };
  auto opt_dbl = [&](const char* key) { return j.contains(key) ? j[key].get<double>() : 0.0; };
  e.seq = opt_u64("seq");
  switch (e.kind) {
    case TraceKind::packet_enqueued:
      e.a = opt_int("pkt");
      break;
    case TraceKind::packet_delivered:
      e.a = opt_int("pkt");
      e.x = opt_dbl("enqueued_ms");
      e.y = opt_dbl("latency_ms");
      break;
    case TraceKind::packet_dropped:
      e.a = opt_int("pkt");
      e.b = opt_int("cause");
      e.x = opt_dbl("enqueued_ms");
      break;
    case TraceKind::poll_exchange:
      e.b = opt_int("lost");
      e.a = opt_int("n_received");
      e.x = opt_dbl("t_wait_ms");
      e.y = opt_dbl("bw_eq4_bps");
      break;
    case TraceKind::bw_estimate:
      e.x = opt_dbl("bw_effective_bps");
      e.y = opt_dbl("eta");
      break;
    case TraceKind::priority_changed:
      e.a = opt_int("priority");
      break;
    case TraceKind::admission:
      e.a = opt_int("band");
      e.b = opt_int("accepted");
      e.x = opt_dbl("sum_bps");
      e.y = opt_dbl("required_bps");
      e.z = opt_dbl("bw_effective_bps");
      break;
    case TraceKind::eviction:
    case TraceKind::readmission:
      e.a = opt_int("priority");
      break;
    case TraceKind::schedule_truncated:
      e.a = opt_int("granted");
      break;
  }
  return e;
}

inline std::string serialize_trace(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += to_line(e);
    out += '\n';
  }
  return out;
}

inline std::vector<TraceEvent> parse_trace(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(parse_line(line));
  }
  return events;
}

}  // namespace aftcs
