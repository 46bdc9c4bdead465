#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "aftcs/reservation.hpp"
#include "oracle_reference.hpp"

using namespace aftcs;
using oracle::Instance;
using oracle::random_instance;

TEST_CASE("admit matches the brute-force three-case reference on 5000 instances") {
  std::mt19937_64 rng(0xA11CE);
  const auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 5000; ++trial) {
    const Instance in = random_instance(rng);
    ReservationQueues q;
    for (const auto& e : in.reserved) q.reserved.push(e);
    for (const auto& e : in.removed) q.removed.push(e);

    const auto expected = oracle::admit_reference(in.reserved, in.removed, in.cand,
                                                  in.bw_effective, in.bw_required, in.b_l, in.b_h);
    const auto got =
        admit(std::move(q), in.cand, in.bw_effective, in.bw_required, in.b_l, in.b_h);

    REQUIRE((got.decision == AdmitDecision::accepted) == expected.accepted);
    std::multiset<SensorId> got_reserved, got_removed;
    for (const auto& e : got.queues.reserved.items()) got_reserved.insert(e.sensor);
    for (const auto& e : got.queues.removed.items()) got_removed.insert(e.sensor);
    REQUIRE(got_reserved == expected.reserved);
    REQUIRE(got_removed == expected.removed);

    // partition invariant: no sensor in both queues
    std::vector<SensorId> overlap;
    std::set_intersection(got_reserved.begin(), got_reserved.end(), got_removed.begin(),
                          got_removed.end(), std::back_inserter(overlap));
    REQUIRE(overlap.empty());

    // heap property must survive every mutation
    REQUIRE(got.queues.reserved.is_heap());
    REQUIRE(got.queues.removed.is_heap());
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(std::chrono::duration_cast<std::chrono::seconds>(elapsed).count() < 10);
}

TEST_CASE("band monotonicity: more effective bandwidth never flips accept to reject") {
  std::mt19937_64 rng(0xB0B);
  for (int trial = 0; trial < 1000; ++trial) {
    const Instance in = random_instance(rng);
    ReservationQueues q1, q2;
    for (const auto& e : in.reserved) {
      q1.reserved.push(e);
      q2.reserved.push(e);
    }
    const auto at_b =
        admit(std::move(q1), in.cand, in.bw_effective, in.bw_required, in.b_l, in.b_h);
    if (at_b.decision != AdmitDecision::accepted) continue;
    const double higher = in.bw_effective * 1.7;
    const auto at_b2 = admit(std::move(q2), in.cand, higher, in.bw_required, in.b_l, in.b_h);
    REQUIRE(at_b2.decision == AdmitDecision::accepted);
  }
}

TEST_CASE("eviction soundness and rejection atomicity") {
  std::mt19937_64 rng(0xE71C);
  int evictions_seen = 0, rejections_seen = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const Instance in = random_instance(rng);
    ReservationQueues q;
    for (const auto& e : in.reserved) q.reserved.push(e);
    const auto before = q.reserved.items();
    const auto res = admit(std::move(q), in.cand, in.bw_effective, in.bw_required, in.b_l, in.b_h);
    if (!res.evicted.empty()) {
      ++evictions_seen;
      REQUIRE(res.decision == AdmitDecision::accepted);
      double sum = 0.0;
      for (const auto& ev : res.evicted) {
        REQUIRE(ev.priority > in.cand.priority);  // strictly less important
        sum += ev.bandwidth_bps;
      }
      REQUIRE(sum >= in.bw_required - in.b_h * in.bw_effective);
    }
    if (res.decision == AdmitDecision::rejected) {
      ++rejections_seen;
      REQUIRE(res.queues.reserved.items() == before);
    }
  }
  CHECK(evictions_seen > 50);
  CHECK(rejections_seen > 100);
}

TEST_CASE("queue maintenance comparisons scale like n log n") {
  std::mt19937_64 rng(0x5CA1E);
  std::vector<double> xs, ys;
  for (std::uint64_t n : {64u, 256u, 1024u, 4096u, 16384u}) {
    std::uint64_t comparisons = 0;
    ReservationQueues q;
    q.set_counter(&comparisons);
    std::uniform_int_distribution<int> prio(0, 6);
    for (std::uint64_t i = 0; i < n; ++i) {
      ReservationEntry cand{static_cast<SensorId>(i + 1), prio(rng), 1.0};
      double bw_eff, req;
      const int band = static_cast<int>(i % 4);
      const double reserved_bw = static_cast<double>(q.reserved.size());
      if (band < 2) {  // plenty of room
        bw_eff = 10.0 * (reserved_bw + 10.0);
        req = reserved_bw + 1.0;
      } else if (band == 2) {  // mid band
        req = reserved_bw + 1.0;
        bw_eff = req / 0.75;
      } else {  // pressure: forces an eviction walk
        req = reserved_bw + 1.0;
        bw_eff = req / 0.95;
      }
      auto res = admit(std::move(q), cand, bw_eff, req, 0.6, 0.9);
      q = std::move(res.queues);
    }
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(static_cast<double>(comparisons) / std::log2(static_cast<double>(n))));
  }
  // least-squares slope of log(count / log n) against log n
  const std::size_t k = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  INFO("empirical exponent " << slope);
  CHECK(slope > 0.9);
  CHECK(slope < 1.3);
}
