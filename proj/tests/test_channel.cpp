#include <catch2/catch_amalgamated.hpp>

#include "aftcs/channel.hpp"

using namespace aftcs;

namespace {
ChannelState default_channel() {
  ChannelState ch;
  ch.radio.ber_alpha = 2.25;
  ch.radio.ber_beta = 0.051;
  ch.radio.reference_loss_db = 57.5;
  ch.radio.tx_power_dbm = 0.0;
  ch.radio.shadowing_sigma_db = 0.0;
  ch.noise_floor_dbm = -100.0;
  ch.distance_m[1] = 1.0;
  ch.rng_seed = 1;
  return ch;
}
}  // namespace

TEST_CASE("clean channel with default geometry is near lossless") {
  auto ch = default_channel();
  // 69-byte data frame (50 B payload + overheads), no shadowing
  CHECK(packet_error_probability(ch, 1, 69, 0.0) < 0.05);
  // delivery after one retry is effectively certain
  const double per = packet_error_probability(ch, 1, 69, 0.0);
  CHECK(per * per < 0.01);
}

TEST_CASE("packet error rises monotonically with the noise floor") {
  auto ch = default_channel();
  double prev = 0.0;
  for (double floor : {-100.0, -90.0, -80.0, -75.0, -70.0, -65.0}) {
    ch.noise_floor_dbm = floor;
    const double per = packet_error_probability(ch, 1, 69, 0.0);
    CHECK(per > prev);
    prev = per;
  }
  ch.noise_floor_dbm = -70.0;
  const double at70 = packet_error_probability(ch, 1, 69, 0.0);
  ch.noise_floor_dbm = -80.0;
  const double at80 = packet_error_probability(ch, 1, 69, 0.0);
  CHECK(at70 > at80);
}

TEST_CASE("empty frame has zero error probability") {
  auto ch = default_channel();
  ch.noise_floor_dbm = -60.0;
  CHECK(packet_error_probability(ch, 1, 0, 0.0) == 0.0);
}

TEST_CASE("oversized frames and bad geometry are rejected") {
  auto ch = default_channel();
  CHECK_THROWS_AS(packet_error_probability(ch, 1, 128, 0.0), std::invalid_argument);
  ch.distance_m[1] = 0.0;
  CHECK_THROWS_AS(snr_db(ch, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(validate(ch), std::invalid_argument);
}

TEST_CASE("noise floor below the ideal floor fails validation") {
  auto ch = default_channel();
  ch.noise_floor_dbm = -110.0;
  CHECK_THROWS_AS(validate(ch), std::invalid_argument);
}

TEST_CASE("BER curve is monotone decreasing in SNR and clamped") {
  RadioProfile radio;
  radio.ber_alpha = 2.25;
  radio.ber_beta = 0.051;
  double prev = 1.0;
  for (double snr = -50.0; snr <= 60.0; snr += 5.0) {
    const double ber = bit_error_rate(radio, snr);
    CHECK(ber <= prev);
    CHECK(ber <= 0.5);
    prev = ber;
  }
}

TEST_CASE("shadowing draws are deterministic per (seed, sensor, interval)") {
  auto ch = default_channel();
  ch.radio.shadowing_sigma_db = 4.0;
  const double a = shadow_draw_db(ch, 1, 17);
  const double b = shadow_draw_db(ch, 1, 17);
  CHECK(a == b);
  CHECK(shadow_draw_db(ch, 1, 18) != a);

  ch.rng_seed = 2;
  CHECK(shadow_draw_db(ch, 1, 17) != a);

  ch.radio.shadowing_sigma_db = 0.0;
  CHECK(shadow_draw_db(ch, 1, 17) == 0.0);
}

TEST_CASE("farther sensors see worse channels") {
  auto ch = default_channel();
  ch.noise_floor_dbm = -75.0;
  ch.distance_m[1] = 1.0;
  ch.distance_m[2] = 1.5;
  CHECK(packet_error_probability(ch, 2, 69, 0.0) > packet_error_probability(ch, 1, 69, 0.0));
}
