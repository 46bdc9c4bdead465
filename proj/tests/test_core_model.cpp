#include <algorithm>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "aftcs/core.hpp"

using namespace aftcs;

TEST_CASE("priority_order follows the smaller-value-wins convention") {
  CHECK(priority_order(PriorityLevel(0), PriorityLevel(6)) == Ordering::higher);
  CHECK(priority_order(PriorityLevel(3), PriorityLevel(3)) == Ordering::equal);
  CHECK(priority_order(PriorityLevel(5), PriorityLevel(2)) == Ordering::lower);
}

TEST_CASE("priority_order agrees with reversed integer comparison") {
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b) {
      const auto ord = priority_order(PriorityLevel(a), PriorityLevel(b));
      if (a < b) CHECK(ord == Ordering::higher);
      else if (a == b) CHECK(ord == Ordering::equal);
      else CHECK(ord == Ordering::lower);
    }
}

TEST_CASE("priority level range is enforced") {
  CHECK_THROWS_AS(PriorityLevel(7), std::out_of_range);
  CHECK_THROWS_AS(PriorityLevel(-1), std::out_of_range);
  CHECK_NOTHROW(PriorityLevel(9, 9));
}

TEST_CASE("sensor_sort_key orders by priority, then bandwidth, then id") {
  // Figure-3 style tie: equal priority, the smaller reservation first.
  const auto s4 = sensor_sort_key(4, PriorityLevel(3), 10000.0);
  const auto s5 = sensor_sort_key(5, PriorityLevel(3), 20000.0);
  CHECK(s4 < s5);

  const auto s1 = sensor_sort_key(1, PriorityLevel(1), 999999.0);
  const auto s2 = sensor_sort_key(2, PriorityLevel(4), 1.0);
  CHECK(s1 < s2);  // priority dominates bandwidth

  const auto a = sensor_sort_key(2, PriorityLevel(2), 500.0);
  const auto b = sensor_sort_key(7, PriorityLevel(2), 500.0);
  CHECK(a < b);  // full tie broken by id
}

TEST_CASE("sort key induces a total order (property)") {
  std::mt19937_64 rng(20250810);
  std::uniform_int_distribution<int> prio(0, 6);
  std::uniform_real_distribution<double> bw(0.0, 1000.0);

  std::vector<SensorSortKey> keys;
  for (SensorId id = 0; id < 64; ++id)
    keys.push_back(sensor_sort_key(id, PriorityLevel(prio(rng)), bw(rng)));

  // Sorting any permutation yields the same sequence (determinism oracle).
  auto sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  for (int trial = 0; trial < 50; ++trial) {
    auto shuffled = keys;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::sort(shuffled.begin(), shuffled.end());
    REQUIRE(shuffled == sorted);
  }

  // Antisymmetry and transitivity over random triples.
  std::uniform_int_distribution<std::size_t> pick(0, keys.size() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto &x = keys[pick(rng)], &y = keys[pick(rng)], &z = keys[pick(rng)];
    if (x < y) CHECK_FALSE(y < x);
    if (x < y && y < z) CHECK(x < z);
    if (!(x < y) && !(y < x)) CHECK(x == y);
  }
}

TEST_CASE("sensor spec validation catches the documented edge cases") {
  RadioProfile radio;
  SensorSpec s;
  s.id = 1;
  s.name = "ECG";
  s.payload_bytes = 50;
  s.tx_rate_pps = 10;
  s.priority_set = {0, 1, 2, 3};
  s.initial_priority = 2;
  CHECK_NOTHROW(validate(s, radio, 6));

  auto bad = s;
  bad.initial_priority = 5;
  CHECK_THROWS(validate(bad, radio, 6));

  bad = s;
  bad.payload_bytes = radio.max_payload_bytes() + 1;
  CHECK_THROWS(validate(bad, radio, 6));

  bad = s;
  bad.k_min = 2;  // delay sensitivity off
  CHECK_THROWS(validate(bad, radio, 6));

  bad = s;
  bad.high_delay_sensitivity = true;
  bad.k_min = 2;
  CHECK_NOTHROW(validate(bad, radio, 6));
}

TEST_CASE("interval params invariants") {
  IntervalParams ip{100.0, 19, 50, 5.0, 20.0};
  CHECK_NOTHROW(validate(ip));
  ip.t_min_pkt_ms = 25.0;
  CHECK_THROWS(validate(ip));
  ip = {100.0, 30, 50, 5.0, 20.0};
  CHECK_THROWS(validate(ip));  // n_pkt * t_min > interval
}
