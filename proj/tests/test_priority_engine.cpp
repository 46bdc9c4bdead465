#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "aftcs/fault_info.hpp"
#include "aftcs/priority_engine.hpp"

using namespace aftcs;
using Catch::Matchers::WithinAbs;

namespace {

// Table-2 style rules for a temperature-like sensor with set {p1 > p2 > p3}
// mapped onto levels {5, 4, 3}: normal favors the least important level.
FavorabilityTable temperature_table() {
  FavorabilityTable t;
  FavorabilityTable::ChannelRule rule;
  rule.w_favorable = 0.1;
  rule.w_unfavorable = 0.1;
  rule.partition.bands = {{36.0, "low"}, {37.4, "normal"}, {100.0, "high"}};
  rule.impact["low"] = {{5, Favorability::unfavorable},
                        {4, Favorability::favorable},
                        {3, Favorability::favorable}};
  rule.impact["normal"] = {{5, Favorability::favorable},
                           {4, Favorability::unfavorable},
                           {3, Favorability::unfavorable}};
  rule.impact["high"] = {{5, Favorability::unfavorable},
                         {4, Favorability::favorable},
                         {3, Favorability::favorable}};
  t.channels["body_temperature"] = rule;
  return t;
}

SensorSpec spec_with_set(std::vector<int> set, int initial) {
  SensorSpec s;
  s.id = 1;
  s.name = "probe";
  s.payload_bytes = 10;
  s.tx_rate_pps = 1.0;
  s.priority_set = std::move(set);
  s.initial_priority = initial;
  return s;
}

}  // namespace

TEST_CASE("classify_reading follows the category table") {
  const auto table = temperature_table();
  FaultInfo info{FaultKind::bio, "body_temperature", 36.8, 0.0};

  // normal band favors the least-important level of the set
  CHECK(classify_reading(table, info, PriorityLevel(5)) == Favorability::favorable);
  info.value = 35.0;
  CHECK(classify_reading(table, info, PriorityLevel(5)) == Favorability::unfavorable);
  CHECK(classify_reading(table, info, PriorityLevel(3)) == Favorability::favorable);

  // unlisted (category, priority) pairs default to neutral
  info.value = 36.8;
  CHECK(classify_reading(table, info, PriorityLevel(6)) == Favorability::neutral);

  FaultInfo unknown{FaultKind::bio, "no_such_channel", 0.0, 0.0};
  CHECK_THROWS_AS(classify_reading(table, unknown, PriorityLevel(3)), std::invalid_argument);
}

TEST_CASE("adjustment factor is the signed weighted sum") {
  using WC = WeightedClassification;
  CHECK_THAT(adjustment_factor({WC{Favorability::favorable, 0.1, 0.1},
                                WC{Favorability::favorable, 0.1, 0.1}}),
             WithinAbs(0.2, 1e-12));
  CHECK_THAT(adjustment_factor({WC{Favorability::unfavorable, 0.1, 0.2}}),
             WithinAbs(-0.2, 1e-12));
  CHECK_THAT(adjustment_factor({WC{Favorability::favorable, 0.1, 0.1},
                                WC{Favorability::unfavorable, 0.1, 0.1}}),
             WithinAbs(0.0, 1e-12));
  CHECK_THAT(adjustment_factor({WC{Favorability::neutral, 0.5, 0.5}}), WithinAbs(0.0, 1e-12));
}

TEST_CASE("acquiescence holds for lambda after an activation") {
  auto st = PriorityState::initial(spec_with_set({2, 3, 4, 5}, 4), 0.4, 10000.0);
  CHECK(acquiescence(st, st.current, 5000.0) == 1);
  CHECK(acquiescence(st, st.current, 9999.0) == 1);
  CHECK(acquiescence(st, st.current, 10000.0) == 0);
  CHECK(acquiescence(st, st.current, 15000.0) == 0);

  st.lambda_ms[4] = 0.0;  // zero-length hold never acquiesces
  CHECK(acquiescence(st, st.current, 0.0) == 0);
}

TEST_CASE("tuners pin to zero during the hold and accumulate afterwards") {
  auto st = PriorityState::initial(spec_with_set({2, 3, 4, 5}, 4), 0.4, 10000.0);
  std::map<int, double> deltas{{2, 0.3}, {3, 0.1}, {4, 0.0}, {5, -0.3}};

  auto held = step_tuners(st, deltas, 5000.0);
  for (const auto& [level, m] : held.tuners) CHECK(m == 0.0);

  auto moved = step_tuners(held, deltas, 12000.0);
  CHECK_THAT(moved.tuners[2], WithinAbs(0.3, 1e-12));
  CHECK_THAT(moved.tuners[5], WithinAbs(-0.3, 1e-12));

  moved = step_tuners(moved, deltas, 13000.0);
  CHECK_THAT(moved.tuners[5], WithinAbs(-0.6, 1e-12));  // no lower clamp

  // recurrence example: 0.1 + 0.1 and 0.1 - 0.3
  auto st2 = PriorityState::initial(spec_with_set({1, 2}, 1), 0.4, 0.0);
  st2.tuners[2] = 0.1;
  auto a = step_tuners(st2, {{2, 0.1}}, 1000.0);
  CHECK_THAT(a.tuners[2], WithinAbs(0.2, 1e-12));
  auto b = step_tuners(st2, {{2, -0.3}}, 1000.0);
  CHECK_THAT(b.tuners[2], WithinAbs(-0.2, 1e-12));
}

TEST_CASE("activation picks the crossing tuner, resets everything") {
  auto st = PriorityState::initial(spec_with_set({1, 2, 3}, 1), 0.4, 0.0);

  SECTION("single tuner over threshold") {
    st.tuners[2] = 0.45;
    st.tuners[3] = 0.39;
    auto [next, activated] = try_activate(st, 42000.0);
    REQUIRE(activated);
    CHECK(activated->value() == 2);
    CHECK(next.activation_time_ms == 42000.0);
    for (const auto& [level, m] : next.tuners) CHECK(m == 0.0);
  }
  SECTION("highest priority wins when several cross") {
    st.current = PriorityLevel(1);
    st.tuners[2] = 0.5;
    st.tuners[3] = 0.6;
    // smaller value = higher priority: 2 wins over 3
    auto [next, activated] = try_activate(st, 1.0);
    REQUIRE(activated);
    CHECK(activated->value() == 2);
  }
  SECTION("nothing over threshold leaves the state untouched") {
    st.tuners[2] = 0.39;
    auto [next, activated] = try_activate(st, 1.0);
    CHECK_FALSE(activated);
    CHECK(next.current.value() == st.current.value());
    CHECK_THAT(next.tuners[2], WithinAbs(0.39, 1e-12));
  }
  SECTION("threshold comparison is inclusive") {
    st.tuners[3] = 0.4;
    auto [next, activated] = try_activate(st, 1.0);
    REQUIRE(activated);
    CHECK(activated->value() == 3);
  }
}

TEST_CASE("priority queue ordering matches the Figure-3 example") {
  std::vector<PriorityState> states;
  std::map<SensorId, double> bw;
  auto add = [&](SensorId id, int prio, double share) {
    auto st = PriorityState::initial(spec_with_set({0, 1, 2, 3, 4, 5, 6}, prio), 0.4, 0.0);
    st.sensor = id;
    states.push_back(st);
    bw[id] = share;
  };
  add(1, 1, 50.0);
  add(2, 2, 10.0);
  add(3, 2, 20.0);
  add(4, 3, 10000.0);
  add(5, 3, 20000.0);
  CHECK(build_priority_queue(states, bw) == std::vector<SensorId>{1, 2, 3, 4, 5});

  states.resize(1);
  CHECK(build_priority_queue(states, bw) == std::vector<SensorId>{1});

  // identical keys except id: ascending ids
  states.clear();
  add(7, 2, 100.0);
  add(2, 2, 100.0);
  CHECK(build_priority_queue(states, bw) == std::vector<SensorId>{2, 7});
}

TEST_CASE("randomized tick property suite") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> delta_dist(-0.3, 0.3);
  std::uniform_int_distribution<int> lambda_dist(0, 20);

  const std::vector<int> set{0, 2, 4, 6};
  auto st = PriorityState::initial(spec_with_set(set, 4), 0.4, 0.0);
  for (int level : set) st.lambda_ms[level] = lambda_dist(rng) * 1000.0;

  int activations = 0;
  for (int tick = 0; tick < 10000; ++tick) {
    const Millis t = tick * 1000.0;
    std::map<int, double> deltas;
    for (int level : set) deltas[level] = delta_dist(rng);
    const bool held = acquiescence(st, st.current, t) == 1;
    st = step_tuners(st, deltas, t);
    if (held)
      for (const auto& [level, m] : st.tuners) REQUIRE(m == 0.0);
    auto [next, activated] = try_activate(st, t);
    st = std::move(next);
    if (activated) {
      ++activations;
      REQUIRE(std::find(set.begin(), set.end(), activated->value()) != set.end());
      for (const auto& [level, m] : st.tuners) REQUIRE(m == 0.0);  // reset invariant
      REQUIRE(st.activation_time_ms == t);
    }
    REQUIRE(std::find(set.begin(), set.end(), st.current.value()) != set.end());
  }
  CHECK(activations > 10);  // the walk actually moved
}

TEST_CASE("closed-form first activation under constant positive delta") {
  const double theta = 0.4;
  // deltas whose running sums are exact (or err upward) in binary
  for (double delta : {0.0625, 0.125, 0.2, 0.25, 0.4}) {
    const Millis lambda = 10000.0;
    auto st = PriorityState::initial(spec_with_set({1, 2}, 1), theta, lambda);
    // last held tick is the final tick with t - activation < lambda
    const long long last_held_tick = static_cast<long long>(lambda / 1000.0) - 1;
    long long first_activation = -1;
    for (long long tick = 0; tick < 200 && first_activation < 0; ++tick) {
      const Millis t = tick * 1000.0;
      st = step_tuners(st, {{2, delta}}, t);
      auto [next, activated] = try_activate(st, t);
      st = std::move(next);
      if (activated) first_activation = tick;
    }
    REQUIRE(first_activation >= 0);
    CHECK(first_activation - last_held_tick ==
          static_cast<long long>(std::ceil(theta / delta - 1e-12)));
  }
}
