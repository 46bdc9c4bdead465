#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aftcs/bandwidth.hpp"
#include "aftcs/channel.hpp"
#include "aftcs/core.hpp"
#include "aftcs/fault_info.hpp"
#include "aftcs/priority_engine.hpp"
#include "aftcs/reservation.hpp"
#include "aftcs/rng.hpp"
#include "aftcs/scenario.hpp"
#include "aftcs/trace.hpp"

namespace aftcs {

enum class SchemeKind { aftcs, fixed_priority_baseline };

inline const char* scheme_name(SchemeKind s) {
  return s == SchemeKind::aftcs ? "aftcs" : "fixed_priority_baseline";
}

inline SchemeKind scheme_from_name(const std::string& s) {
  if (s == "aftcs") return SchemeKind::aftcs;
  if (s == "baseline" || s == "fixed_priority_baseline") return SchemeKind::fixed_priority_baseline;
  throw std::invalid_argument("unknown scheme: " + s);
}

struct SensorTotals {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_channel = 0;
  std::uint64_t dropped_buffer = 0;
  std::uint64_t dropped_retry_limit = 0;
  std::uint64_t still_queued = 0;

  bool conserved() const {
    return generated ==
           delivered + dropped_channel + dropped_buffer + dropped_retry_limit + still_queued;
  }
};

struct RunResult {
  std::vector<TraceEvent> trace;
  std::map<SensorId, SensorTotals> totals;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  SchemeKind scheme = SchemeKind::aftcs;
};

/// Deterministic per-interval simulation of one scenario run.
class Simulation {
 public:
  Simulation(ScenarioConfig cfg, SchemeKind scheme, std::uint64_t seed)
      : cfg_(std::move(cfg)), scheme_(scheme), seed_(seed) {
    channel_.radio = cfg_.radio;
    channel_.rng_seed = seed;
    for (const auto& sc : cfg_.sensors) channel_.distance_m[sc.spec.id] = sc.spec.distance_m;
    const double bw_ideal = ideal_bandwidth(cfg_.interval);
    estimator_.emplace(bw_ideal, cfg_.estimator_alpha, cfg_.interval.t_min_pkt_ms);

    for (const auto& sc : cfg_.sensors) {
      Node node;
      node.config = &sc;
      node.pstate = PriorityState::initial(sc.spec, cfg_.theta, cfg_.lambda_ms);
      node.regime = sc.initial_regime;
      node.poll_time_ewma_ms = nominal_poll_time_ms();
      nodes_.push_back(std::move(node));
    }
    std::sort(nodes_.begin(), nodes_.end(),
              [](const Node& a, const Node& b) { return a.config->spec.id < b.config->spec.id; });
  }

  RunResult run() {
    trace_.clear();
    register_sensors();
    const std::uint64_t n_intervals =
        static_cast<std::uint64_t>(std::llround(cfg_.duration_ms() / cfg_.interval.t_interval_ms));
    const std::uint64_t ticks_per_interval =
        static_cast<std::uint64_t>(std::llround(cfg_.tick_ms / cfg_.interval.t_interval_ms));
    for (std::uint64_t k = 0; k < n_intervals; ++k) {
      const Millis t0 = k * cfg_.interval.t_interval_ms;
      const NoiseSegment* segment = segment_at(t0);
      if (segment) {
        channel_.noise_floor_dbm = segment->noise_floor_dbm;
        for (auto& node : nodes_) {
          auto it = segment->regimes.find(node.config->spec.name);
          if (it != segment->regimes.end()) node.regime = it->second;
        }
      }
      enqueue_arrivals(t0);
      if (ticks_per_interval > 0 && k % ticks_per_interval == 0) process_tick(t0, k);
      refresh_queue_entries();
      fire_value_triggers(t0);
      simulate_interval(k, t0);
    }

    RunResult result;
    for (auto& node : nodes_) {
      node.totals.still_queued = node.queue.size();
      result.totals[node.config->spec.id] = node.totals;
      if (!node.totals.conserved())
        throw std::logic_error("packet conservation violated for sensor " +
                               node.config->spec.name);
    }
    result.trace = std::move(trace_);
    result.config_hash = cfg_.config_hash;
    result.seed = seed_;
    result.scheme = scheme_;
    return result;
  }

  const ScenarioConfig& config() const { return cfg_; }

 private:
  struct Packet {
    std::uint64_t seq = 0;
    PacketKind kind = PacketKind::data;
    int bytes = 0;
    Millis enqueued_ms = 0.0;
    std::uint32_t total_attempts = 0;  // lifetime attempt index, keys the channel draws
  };

  struct Node {
    const SensorConfig* config = nullptr;
    PriorityState pstate;
    std::string regime;
    std::deque<Packet> queue;
    std::uint64_t next_seq = 1;
    Millis next_arrival_ms = 0.0;
    std::size_t buffer_used_bytes = 0;
    double poll_time_ewma_ms = 0.0;
    std::vector<double> recent_readings;
    bool buffer_alarm = false;
    SensorTotals totals;
  };

  // --- small helpers -------------------------------------------------------

  Node& node_of(SensorId id) {
    for (auto& n : nodes_)
      if (n.config->spec.id == id) return n;
    throw std::logic_error("unknown sensor id in engine");
  }

  const NoiseSegment* segment_at(Millis t_ms) const {
    const double t_s = t_ms / 1000.0;
    for (const auto& seg : cfg_.schedule)
      if (t_s >= seg.start_s && t_s < seg.end_s) return &seg;
    return cfg_.schedule.empty() ? nullptr : &cfg_.schedule.back();
  }

  int current_priority(const Node& node) const {
    return scheme_ == SchemeKind::aftcs ? node.pstate.current.value()
                                        : node.config->spec.initial_priority;
  }

  double poll_frame_airtime_ms() const {
    return cfg_.radio.frame_airtime_ms(cfg_.polling_payload_bytes);
  }
  double nominal_poll_time_ms() const {
    return poll_frame_airtime_ms() + cfg_.probe_packets * cfg_.interval.t_min_pkt_ms;
  }

  double bw_hat() const { return estimator_->bw_effective_bps(); }

  Millis packet_time_ms() const {
    auto t = adapt_packet_time(cfg_.interval, estimator_->bw_ideal_bps(), bw_hat());
    return t ? *t : cfg_.interval.t_max_pkt_ms;
  }

  bool channel_dead() const { return estimator_->eta() < 1e-12; }

  int nominal_packets_per_interval(const Node& node) const {
    return std::max<int>(
        1, static_cast<int>(std::llround(node.config->spec.tx_rate_pps *
                                         cfg_.interval.t_interval_ms / 1000.0)));
  }

  int eq_packet_count(const Node& node, Millis t_i_ms) const {
    if (bw_hat() <= 0.0) return nominal_packets_per_interval(node);
    return adapt_packet_count(nominal_packets_per_interval(node), t_i_ms, cfg_.interval,
                              estimator_->bw_ideal_bps(), bw_hat(), node.config->spec);
  }

  // Effective-bandwidth share of one sensor's data reservation: the interval
  // time its adapted slots take, priced at the current effective bandwidth.
  double data_share_bps(const Node& node) const {
    const Millis t_i = packet_time_ms();
    const double frac =
        node.config->spec.tx_rate_pps * t_i / 1000.0;  // fraction of airtime per second
    return frac * bw_hat();
  }

  double poll_share_bps(const Node& node) const {
    return node.poll_time_ewma_ms / cfg_.interval.t_interval_ms * bw_hat();
  }

  double fixed_overhead_bps() const {
    const double ctrl_ms_per_s =
        cfg_.control_rate_pps * cfg_.radio.frame_airtime_ms(cfg_.control_packet_bytes);
    const double aware_ms_per_s =
        cfg_.aware_rate_pps * cfg_.radio.frame_airtime_ms(cfg_.aware_packet_bytes);
    return (ctrl_ms_per_s + aware_ms_per_s) / 1000.0 * bw_hat();
  }

  double required_with(const ReservationEntry& cand, const ReservationQueues& q) {
    double req = fixed_overhead_bps() + cand.bandwidth_bps + poll_share_bps(node_of(cand.sensor));
    for (const auto& e : q.reserved.items())
      req += e.bandwidth_bps + poll_share_bps(node_of(e.sensor));
    return req;
  }

  double required_current() {
    double req = fixed_overhead_bps();
    for (const auto& e : queues_.reserved.items())
      req += e.bandwidth_bps + poll_share_bps(node_of(e.sensor));
    return req;
  }

  ReservationEntry entry_for(Node& node) {
    return ReservationEntry{node.config->spec.id, current_priority(node), data_share_bps(node)};
  }

  std::vector<SensorId> reserved_service_order() const {
    std::vector<ReservationEntry> entries = queues_.reserved.items();
    std::sort(entries.begin(), entries.end(),
              [](const ReservationEntry& a, const ReservationEntry& b) { return a.key() < b.key(); });
    std::vector<SensorId> order;
    order.reserve(entries.size());
    for (const auto& e : entries) order.push_back(e.sensor);
    return order;
  }

  void emit(TraceEvent e) { trace_.push_back(e); }

  // --- setup ---------------------------------------------------------------

  void register_sensors() {
    for (auto& node : nodes_) {
      emit({0.0, TraceKind::priority_changed, node.config->spec.id, 0, current_priority(node)});
    }
    for (auto& node : nodes_) {
      ReservationEntry cand = entry_for(node);
      const double req = required_with(cand, queues_);
      submit(node, cand, req, 0.0);
    }
    prev_bw_hat_ = bw_hat();
    prev_required_ = required_current();
  }

  void submit(Node& node, const ReservationEntry& cand, double req, Millis t) {
    AdmitResult res = admit(std::move(queues_), cand, bw_hat(), req, cfg_.b_l, cfg_.b_h);
    queues_ = std::move(res.queues);
    TraceEvent e{t, TraceKind::admission, node.config->spec.id};
    e.a = static_cast<int>(res.band) + 1;
    e.b = res.decision == AdmitDecision::accepted ? 1 : 0;
    e.x = res.eviction_sum_bps;
    e.y = req;
    e.z = bw_hat();
    emit(e);
    for (const auto& ev : res.evicted)
      emit({t, TraceKind::eviction, ev.sensor, 0, ev.priority});
  }

  void run_rescan(RescanTrigger trigger, Millis t) {
    if (queues_.removed.empty()) return;
    RescanContext ctx;
    ctx.bw_effective_bps = bw_hat();
    ctx.b_l = cfg_.b_l;
    ctx.b_h = cfg_.b_h;
    ctx.bw_required_with = [this](const ReservationEntry& cand, const ReservationQueues& q) {
      return required_with(cand, q);
    };
    RescanOutcome out = re_reservation_scan(std::move(queues_), trigger, ctx);
    queues_ = std::move(out.queues);
    for (SensorId id : out.readmitted)
      emit({t, TraceKind::readmission, id, 0, current_priority(node_of(id))});
  }

  // --- per-tick fault-info and priority work --------------------------------

  std::vector<FaultInfo> generate_fault_info(Node& node, Millis t, std::uint64_t tick_index) {
    std::vector<FaultInfo> infos;
    const auto& sc = *node.config;
    for (const auto& [name, source] : sc.channel_sources) {
      FaultInfo info;
      info.channel_name = name;
      info.timestamp_ms = t;
      info.kind = detail::fault_kind_of(source);
      switch (source) {
        case ChannelSource::reading: {
          const auto& regime = sc.regimes.at(node.regime);
          const double value = regime.mean + regime.sigma * rng::draw_normal(seed_, rng::Stream::reading,
                                                                             sc.spec.id, tick_index);
          node.recent_readings.push_back(value);
          if (node.recent_readings.size() > 10)
            node.recent_readings.erase(node.recent_readings.begin());
          info.value = value;
          break;
        }
        case ChannelSource::reading_volatility: {
          const auto& xs = node.recent_readings;
          if (xs.size() < 2) {
            info.value = 0.0;
          } else {
            const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
            double var = 0.0;
            for (double v : xs) var += (v - mean) * (v - mean);
            info.value = std::sqrt(var / (xs.size() - 1));
          }
          break;
        }
        case ChannelSource::channel_quality:
          info.value = channel_quality_value_;
          break;
        case ChannelSource::buffer_utilization:
          info.value = static_cast<double>(node.buffer_used_bytes) / cfg_.buffer_bytes;
          break;
        case ChannelSource::battery:
          info.value = 1.0 - 0.2 * (t / std::max(1.0, cfg_.duration_ms()));
          break;
      }
      infos.push_back(std::move(info));
    }
    return infos;
  }

  void process_tick(Millis t, std::uint64_t interval_index) {
    const std::uint64_t tick_index =
        static_cast<std::uint64_t>(std::llround(t / cfg_.tick_ms));
    (void)interval_index;
    const double window_mean = estimator_->roll_tick();
    quality_history_.push_back(window_mean);
    if (quality_history_.size() > 3) quality_history_.erase(quality_history_.begin());
    double sum = 0.0;
    for (double v : quality_history_) sum += v;
    channel_quality_value_ = sum / quality_history_.size();
    if (scheme_ != SchemeKind::aftcs) return;

    for (auto& node : nodes_) {
      auto infos = generate_fault_info(node, t, tick_index);
      std::map<int, double> deltas;
      for (int level : node.config->spec.priority_set) {
        std::vector<WeightedClassification> classifications;
        for (const auto& info : infos) {
          const auto& rule = node.config->favorability.channels.at(info.channel_name);
          classifications.push_back({classify_reading(node.config->favorability, info,
                                                      PriorityLevel(level, cfg_.max_level)),
                                     rule.w_favorable, rule.w_unfavorable});
        }
        deltas[level] = adjustment_factor(classifications);
      }
      node.pstate = step_tuners(std::move(node.pstate), deltas, t);
      auto [next, activated] = try_activate(std::move(node.pstate), t);
      node.pstate = std::move(next);
      if (activated) on_priority_change(node, *activated, t);
    }
  }

  void on_priority_change(Node& node, PriorityLevel level, Millis t) {
    const SensorId id = node.config->spec.id;
    emit({t, TraceKind::priority_changed, id, 0, level.value()});

    if (queues_.in_reserved(id)) {
      auto old_entry = queues_.take_from_reserved(id);
      ReservationEntry cand = entry_for(node);
      const double req = required_with(cand, queues_);
      submit(node, cand, req, t);
      if (old_entry && level.value() > old_entry->priority)
        run_rescan(RescanTrigger::reserved_priority_lowered, t);
    } else if (queues_.in_removed(id)) {
      auto old_entry = queues_.take_from_removed(id);
      ReservationEntry updated = entry_for(node);
      queues_.removed.push(updated);
      if (old_entry && level.value() < old_entry->priority)
        run_rescan(RescanTrigger::priority_raised, t);
    }
  }

  // --- per-interval reservation upkeep --------------------------------------

  void refresh_queue_entries() {
    auto refresh = [this](ReservationEntry& e) {
      Node& node = node_of(e.sensor);
      e.priority = current_priority(node);
      e.bandwidth_bps = data_share_bps(node);
    };
    queues_.reserved.update_all(refresh);
    queues_.removed.update_all(refresh);
  }

  void fire_value_triggers(Millis t) {
    const double req = required_current();
    const double bw = bw_hat();
    if (!queues_.removed.empty()) {
      if (bw > prev_bw_hat_ * 1.02) {
        run_rescan(RescanTrigger::effective_bw_increased, t);
        prev_bw_hat_ = bw;
        prev_required_ = req;
      } else if (req < prev_required_ * 0.98) {
        run_rescan(RescanTrigger::requirement_reduced, t);
        prev_bw_hat_ = bw;
        prev_required_ = req;
      }
      if (bw < prev_bw_hat_) prev_bw_hat_ = bw;  // track downward moves immediately
      if (req > prev_required_) prev_required_ = req;
    } else {
      prev_bw_hat_ = bw;
      prev_required_ = req;
    }
  }

  // --- the data plane --------------------------------------------------------

  void enqueue_arrivals(Millis t0) {
    const Millis t_end = t0 + cfg_.interval.t_interval_ms;
    for (auto& node : nodes_) {
      const double rate = node.config->spec.tx_rate_pps;
      if (rate <= 0.0) continue;
      while (node.next_arrival_ms < t_end) {
        enqueue_packet(node, PacketKind::data, node.config->spec.payload_bytes,
                       node.next_arrival_ms);
        node.next_arrival_ms += 1000.0 / rate;
      }
    }
  }

  void enqueue_packet(Node& node, PacketKind kind, int bytes, Millis t) {
    node.totals.generated += 1;
    if (node.buffer_used_bytes + bytes > cfg_.buffer_bytes) {
      node.totals.dropped_buffer += 1;
      TraceEvent e{t, TraceKind::packet_dropped, node.config->spec.id, node.next_seq++};
      e.a = static_cast<int>(kind);
      e.b = static_cast<int>(DropCause::buffer);
      e.x = t;
      emit(e);
      return;
    }
    Packet pkt;
    pkt.seq = node.next_seq++;
    pkt.kind = kind;
    pkt.bytes = bytes;
    pkt.enqueued_ms = t;
    node.buffer_used_bytes += bytes;
    node.queue.push_back(pkt);
    TraceEvent e{t, TraceKind::packet_enqueued, node.config->spec.id, pkt.seq};
    e.a = static_cast<int>(kind);
    emit(e);
    check_buffer_alarm(node, t);
  }

  void check_buffer_alarm(Node& node, Millis t) {
    const double util = static_cast<double>(node.buffer_used_bytes) / cfg_.buffer_bytes;
    if (!node.buffer_alarm && util >= cfg_.buffer_critical) {
      node.buffer_alarm = true;
      enqueue_packet(node, PacketKind::aware, cfg_.aware_packet_bytes, t);
    } else if (node.buffer_alarm && util < cfg_.buffer_warn) {
      node.buffer_alarm = false;
    }
  }

  double data_per(const Node& node, int bytes, double shadow_db) const {
    const int frame = bytes + cfg_.radio.phy_overhead_bytes + cfg_.radio.mac_overhead_bytes;
    return packet_error_probability(channel_, node.config->spec.id, frame, shadow_db);
  }

  void deliver(Node& node, const Packet& pkt, Millis at) {
    node.totals.delivered += 1;
    node.buffer_used_bytes -= pkt.bytes;
    TraceEvent e{at, TraceKind::packet_delivered, node.config->spec.id, pkt.seq};
    e.a = static_cast<int>(pkt.kind);
    e.x = pkt.enqueued_ms;
    e.y = at - pkt.enqueued_ms;
    emit(e);
    check_buffer_alarm(node, at);
  }

  void drop(Node& node, const Packet& pkt, DropCause cause, Millis at) {
    if (cause == DropCause::retry_limit) node.totals.dropped_retry_limit += 1;
    else node.totals.dropped_channel += 1;
    node.buffer_used_bytes -= pkt.bytes;
    TraceEvent e{at, TraceKind::packet_dropped, node.config->spec.id, pkt.seq};
    e.a = static_cast<int>(pkt.kind);
    e.b = static_cast<int>(cause);
    e.x = pkt.enqueued_ms;
    emit(e);
  }

  // One poll exchange; returns the time consumed.
  Millis poll_sensor(Node& node, Millis start, Millis interval_end, std::uint64_t k,
                     double shadow) {
    const SensorId id = node.config->spec.id;
    const Millis t_i = packet_time_ms();
    const int d_eq = eq_packet_count(node, t_i);
    const Millis deadline = t_i * d_eq + cfg_.interval.t_max_pkt_ms;
    const int poll_frame =
        cfg_.polling_payload_bytes + cfg_.radio.phy_overhead_bytes + cfg_.radio.mac_overhead_bytes;
    const double per_poll = packet_error_probability(channel_, id, poll_frame, shadow);
    const bool lost = rng::draw_uniform(seed_, rng::Stream::poll, id, k) < per_poll;

    Millis used = 0.0;
    int n_received = 0;
    Millis t_wait = 0.0;
    if (lost) {
      used = std::min(deadline, interval_end - start);
      t_wait = used;
      estimator_->add_ratio_sample(0.0);
    } else {
      used = poll_frame_airtime_ms();
      int probes = 0;
      int delivered_count = 0;
      while (probes < cfg_.probe_packets && start + used + cfg_.interval.t_min_pkt_ms <= interval_end) {
        if (node.queue.empty() || node.queue.front().enqueued_ms > start + used) break;
        Packet& pkt = node.queue.front();
        const std::uint32_t attempt = pkt.total_attempts++;
        const bool ok = rng::draw_uniform(seed_, rng::Stream::data_attempt, id, pkt.seq, attempt) >=
                        data_per(node, pkt.bytes, shadow);
        used += cfg_.interval.t_min_pkt_ms;
        ++probes;
        if (ok) {
          Packet done = pkt;
          node.queue.pop_front();
          deliver(node, done, start + used);
          ++delivered_count;
        }
      }
      n_received = delivered_count;
      t_wait = used;
      if (probes > 0)
        estimator_->add_ratio_sample(static_cast<double>(delivered_count) / probes);
    }

    // Raw Eq.-style sample for the trace.
    double eq4 = 0.0;
    if (t_wait > 0.0) {
      PollExchange x{id, node.config->spec.payload_bytes, cfg_.polling_payload_bytes,
                     t_wait, n_received, t_i, d_eq, cfg_.interval.t_max_pkt_ms};
      eq4 = measure_effective_bandwidth(x, start + used).bw_effective_bps;
    }
    node.poll_time_ewma_ms =
        cfg_.estimator_alpha * used + (1.0 - cfg_.estimator_alpha) * node.poll_time_ewma_ms;
    TraceEvent e{start, TraceKind::poll_exchange, id};
    e.a = n_received;
    e.b = lost ? 1 : 0;
    e.x = t_wait;
    e.y = eq4;
    emit(e);
    return used;
  }

  // Serve up to `granted` packets, each in a t_slot sub-slot, ARQ inside.
  void serve_window(Node& node, Millis window_start, int granted, Millis t_slot, double shadow,
                    Millis interval_end) {
    Millis slot_start = window_start;
    const int attempts_per_slot = std::max(
        1, std::min(static_cast<int>(std::llround(t_slot / cfg_.interval.t_min_pkt_ms)),
                    cfg_.retry_limit + 1));
    for (int i = 0; i < granted; ++i) {
      if (slot_start + cfg_.interval.t_min_pkt_ms > interval_end) break;
      if (node.queue.empty() || node.queue.front().enqueued_ms > slot_start) {
        slot_start += t_slot;
        continue;
      }
      Packet& pkt = node.queue.front();
      bool ok = false;
      int tries = 0;
      Millis at = slot_start;
      while (tries < attempts_per_slot && at + cfg_.interval.t_min_pkt_ms <= interval_end) {
        const std::uint32_t attempt = pkt.total_attempts++;
        ++tries;
        at += cfg_.interval.t_min_pkt_ms;
        if (rng::draw_uniform(seed_, rng::Stream::data_attempt, node.config->spec.id, pkt.seq,
                              attempt) >= data_per(node, pkt.bytes, shadow)) {
          ok = true;
          break;
        }
      }
      Packet done = node.queue.front();
      node.queue.pop_front();
      if (ok) {
        deliver(node, done, at);
      } else if (tries >= cfg_.retry_limit + 1) {
        drop(node, done, DropCause::retry_limit, at);
      } else if (tries > 0) {
        drop(node, done, DropCause::channel, at);
      } else {
        node.queue.push_front(done);  // never attempted, keep it
      }
      slot_start += t_slot;
    }
  }

  void simulate_interval(std::uint64_t k, Millis t0) {
    const Millis interval_end = t0 + cfg_.interval.t_interval_ms;
    std::map<SensorId, double> shadows;
    for (auto& node : nodes_)
      shadows[node.config->spec.id] = shadow_draw_db(channel_, node.config->spec.id, k);

    // control/aware budget
    const double ctrl_ms = (cfg_.control_rate_pps * cfg_.radio.frame_airtime_ms(cfg_.control_packet_bytes) +
                            cfg_.aware_rate_pps * cfg_.radio.frame_airtime_ms(cfg_.aware_packet_bytes)) *
                           cfg_.interval.t_interval_ms / 1000.0 / 1000.0 * 1000.0;
    Millis cursor = t0 + ctrl_ms;

    // polling phase, service order
    const std::vector<SensorId> order = reserved_service_order();
    for (SensorId id : order) {
      if (cursor >= interval_end) break;
      Node& node = node_of(id);
      cursor += poll_sensor(node, cursor, interval_end, k, shadows[id]);
    }

    emit({t0, TraceKind::bw_estimate, 0, 0, 0, 0, bw_hat(), estimator_->eta()});

    // data windows; per-packet sub-slots are whole t_min multiples
    if (!channel_dead()) {
      const Millis t_i = packet_time_ms();
      const Millis t_slot =
          std::ceil(t_i / cfg_.interval.t_min_pkt_ms - 1e-9) * cfg_.interval.t_min_pkt_ms;
      std::vector<SlotAllocation> allocations;
      for (SensorId id : order) {
        Node& node = node_of(id);
        const int backlog = static_cast<int>(node.queue.size());
        allocations.push_back({id, t_slot, std::min(backlog, cfg_.interval.n_pkt)});
      }
      IntervalSchedule plan =
          build_interval_schedule(order, allocations, cfg_.interval, cursor - t0);
      if (plan.truncated)
        for (SensorId id : plan.truncated_sensors) {
          int granted = 0;
          for (const auto& w : plan.reserved_windows)
            if (w.sensor == id) granted = w.packets;
          emit({t0, TraceKind::schedule_truncated, id, 0, granted});
        }
      for (const auto& window : plan.reserved_windows) {
        Node& node = node_of(window.sensor);
        serve_window(node, t0 + window.start_ms, window.packets, t_slot,
                     shadows[window.sensor], interval_end);
        cursor = std::max(cursor, std::min(t0 + window.start_ms + window.duration_ms,
                                           interval_end));
      }
      cursor = std::min(std::max(cursor, t0 + plan.best_effort_start_ms), interval_end);
    }

    // best effort for everyone outside the reserved set
    best_effort_phase(cursor, interval_end, k, shadows);

    if (cursor > interval_end + 1e-9)
      throw std::logic_error("interval over-run: schedule feasibility violated");
  }

  void best_effort_phase(Millis cursor, Millis interval_end, std::uint64_t k,
                         const std::map<SensorId, double>& shadows) {
    std::vector<Node*> candidates;
    for (auto& node : nodes_)
      if (!queues_.in_reserved(node.config->spec.id)) candidates.push_back(&node);
    if (candidates.empty()) return;
    std::rotate(candidates.begin(), candidates.begin() + (k % candidates.size()),
                candidates.end());

    // head packet currently in flight per sensor, with its in-interval tries
    std::map<SensorId, int> tries_this_interval;
    bool progress = true;
    while (progress && cursor + cfg_.interval.t_min_pkt_ms <= interval_end) {
      progress = false;
      for (Node* node : candidates) {
        if (cursor + cfg_.interval.t_min_pkt_ms > interval_end) break;
        if (node->queue.empty() || node->queue.front().enqueued_ms > cursor) continue;
        Packet& pkt = node->queue.front();
        const std::uint32_t attempt = pkt.total_attempts++;
        int& tries = tries_this_interval[node->config->spec.id];
        ++tries;
        cursor += cfg_.interval.t_min_pkt_ms;
        progress = true;
        if (rng::draw_uniform(seed_, rng::Stream::data_attempt, node->config->spec.id, pkt.seq,
                              attempt) >= data_per(*node, pkt.bytes, shadows.at(node->config->spec.id))) {
          Packet done = pkt;
          node->queue.pop_front();
          deliver(*node, done, cursor);
          tries = 0;
        } else if (tries >= cfg_.retry_limit + 1) {
          Packet done = pkt;
          node->queue.pop_front();
          drop(*node, done, DropCause::retry_limit, cursor);
          tries = 0;
        }
      }
    }
    // window closes: heads attempted this interval but still undelivered drop
    for (Node* node : candidates) {
      auto it = tries_this_interval.find(node->config->spec.id);
      if (it == tries_this_interval.end() || it->second == 0) continue;
      if (node->queue.empty()) continue;
      Packet done = node->queue.front();
      node->queue.pop_front();
      drop(*node, done, DropCause::channel, interval_end);
    }
  }

  ScenarioConfig cfg_;
  SchemeKind scheme_;
  std::uint64_t seed_;
  ChannelState channel_;
  std::optional<BandwidthEstimator> estimator_;
  ReservationQueues queues_;
  std::vector<Node> nodes_;
  std::vector<TraceEvent> trace_;
  double prev_bw_hat_ = 0.0;
  double prev_required_ = 0.0;
  double channel_quality_value_ = 1.0;
  std::vector<double> quality_history_;
};

inline RunResult run_scenario(const ScenarioConfig& cfg, SchemeKind scheme, std::uint64_t seed) {
  Simulation sim(cfg, scheme, seed);
  return sim.run();
}

}  // namespace aftcs
