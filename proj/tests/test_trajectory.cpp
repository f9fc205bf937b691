#include "support/synthetic.hpp"

#include "f0priv/error.hpp"
#include "f0priv/f0_csv.hpp"
#include "f0priv/trajectory.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace f0priv;
using f0priv::testing::traj;

namespace {

F0Trajectory shifted(const F0Trajectory& a, long k) {
  F0Trajectory b = a;
  b.values.setZero();
  for (long i = 0; i < a.size(); ++i) {
    const long j = i + k;
    if (j >= 0 && j < a.size()) b.values[j] = a.values[i];
  }
  return b;
}

}  // namespace

TEST_CASE("validate reports each violated invariant") {
  CHECK(validate(traj({0, 110, 120})).empty());

  const auto low = validate(traj({0, 35, 120}));
  REQUIRE(low.size() == 1);
  CHECK(low[0].message == "voiced value < 40 Hz at frame 1");
  CHECK(*low[0].frame == 1);

  const auto nan = validate(traj({0, std::numeric_limits<double>::quiet_NaN()}));
  REQUIRE(nan.size() == 1);
  CHECK(nan[0].message == "non-finite at frame 1");

  const auto neg = validate(traj({-5, 100}));
  REQUIRE(neg.size() == 1);
  CHECK(neg[0].message == "negative value at frame 0");

  CHECK(validate(F0Trajectory(0.01, Eigen::ArrayXd(0))).size() == 1);
  CHECK(validate(traj({100}, 0.0)).size() == 1);
}

TEST_CASE("voiced_mean") {
  CHECK(voiced_mean(traj({0, 100, 120, 0, 110})) == 110.0);
  CHECK(voiced_mean(traj({220, 220})) == 220.0);
  try {
    voiced_mean(traj({0, 0}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNoVoicedFrames);
  }
}

TEST_CASE("stats of a constant contour") {
  const F0Stats s = stats(F0Trajectory(0.01, Eigen::ArrayXd::Constant(50, 100.0)));
  REQUIRE(s.complete());
  CHECK(*s.log_f0_var == 0.0);
  CHECK(*s.log_f0_skew == 0.0);
  CHECK(*s.rise_rate_hz_s == 0.0);
  CHECK(*s.voiced_mean_hz == doctest::Approx(100.0));
  CHECK(s.voiced_fraction == 1.0);
}

TEST_CASE("rise rate is the mean positive delta per second") {
  // deltas +10, -5, +10 -> mean rise 10 Hz per 0.01 s
  const F0Stats s = stats(traj({100, 110, 105, 115}, 0.01));
  CHECK(*s.rise_rate_hz_s == doctest::Approx(1000.0).epsilon(1e-12));
  // a rise across an unvoiced gap does not count
  const F0Stats gap = stats(traj({100, 0, 150, 140, 130}, 0.01));
  CHECK(*gap.rise_rate_hz_s == 0.0);
}

TEST_CASE("stats moments against a direct evaluation") {
  const F0Trajectory t = traj({0, 100, 130, 0, 170, 90, 200, 0}, 0.02);
  const F0Stats s = stats(t);
  const std::vector<double> v{100, 130, 170, 90, 200};
  double mean = 0;
  for (double x : v) mean += std::log(x);
  mean /= 5;
  double m2 = 0, m3 = 0;
  for (double x : v) {
    const double d = std::log(x) - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  CHECK(*s.log_f0_mean == doctest::Approx(mean).epsilon(1e-14));
  CHECK(*s.log_f0_var == doctest::Approx(m2 / 4).epsilon(1e-12));
  const double g1 = (m3 / 5) / std::pow(m2 / 5, 1.5);
  CHECK(*s.log_f0_skew == doctest::Approx(g1 * std::sqrt(20.0) / 3.0).epsilon(1e-12));
  // rises: 100->130 (+30), 170->90 no, 90->200 (+110); mean 70 over 0.02 s
  CHECK(*s.rise_rate_hz_s == doctest::Approx(3500.0).epsilon(1e-12));
  CHECK(s.voiced_fraction == doctest::Approx(5.0 / 8.0));
}

TEST_CASE("stats with fewer than three voiced frames are absent") {
  const F0Stats none = stats(traj({0, 0, 0}));
  CHECK(none.voiced_fraction == 0.0);
  CHECK_FALSE(none.voiced_mean_hz.has_value());
  CHECK_FALSE(none.log_f0_var.has_value());
  CHECK_FALSE(none.rise_rate_hz_s.has_value());
  const F0Stats two = stats(traj({0, 100, 120}));
  CHECK_FALSE(two.complete());
  CHECK(two.voiced_fraction == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("stats ignore appended unvoiced frames except voiced_fraction") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const F0Trajectory t = f0priv::testing::random_trajectory(rng, 80);
    F0Trajectory padded = t;
    padded.values.conservativeResize(t.size() + 17);
    padded.values.tail(17).setZero();
    const F0Stats a = stats(t);
    const F0Stats b = stats(padded);
    REQUIRE(a.complete());
    CHECK(*a.log_f0_mean == *b.log_f0_mean);
    CHECK(*a.log_f0_var == *b.log_f0_var);
    CHECK(*a.log_f0_skew == *b.log_f0_skew);
    CHECK(*a.rise_rate_hz_s == *b.rise_rate_hz_s);
    CHECK(*a.voiced_mean_hz == *b.voiced_mean_hz);
    CHECK(b.voiced_fraction < a.voiced_fraction);
  }
}

TEST_CASE("align recovers an exact shift") {
  F0Trajectory a(0.01, Eigen::ArrayXd::Zero(60));
  for (int i = 10; i < 50; ++i) a.values[i] = (i % 7 == 0) ? 0.0 : 120.0 + 3.0 * std::sin(0.4 * i) * i;
  const AlignmentResult r = align(a, shifted(a, 3), 8);
  CHECK(r.lag_frames == 3);
  CHECK(r.rmse_voiced_hz == 0.0);
  CHECK(r.voicing_agreement == 1.0);

  const AlignmentResult self = align(a, a, 5);
  CHECK(self.lag_frames == 0);
  CHECK(self.voicing_agreement == 1.0);
}

TEST_CASE("align on a ramp with a constant offset") {
  F0Trajectory a(0.01, Eigen::ArrayXd::LinSpaced(21, 100.0, 200.0));
  F0Trajectory b = a;
  b.values += 5.0;
  const AlignmentResult r = align(a, b, 5);
  CHECK(r.lag_frames == 0);
  CHECK(r.rmse_voiced_hz == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("align property: shift by k is found exactly for |k| <= L") {
  std::mt19937_64 rng(5);
  const long max_lag = 6;
  for (int trial = 0; trial < 60; ++trial) {
    F0Trajectory a = f0priv::testing::random_trajectory(rng, 120);
    a.values.head(max_lag).setZero();
    a.values.tail(max_lag).setZero();
    if (a.voiced_count() < 2) continue;
    const Eigen::ArrayXd v = voiced_values(a);
    if (v.maxCoeff() == v.minCoeff()) continue;
    for (long k = -max_lag; k <= max_lag; ++k) {
      const AlignmentResult r = align(a, shifted(a, k), max_lag);
      CHECK(r.lag_frames == k);
      CHECK(r.rmse_voiced_hz == 0.0);
    }
  }
}

TEST_CASE("align errors") {
  CHECK_THROWS_AS(align(traj({0, 0, 0}), traj({100, 100, 100}), 2), Error);
  CHECK_THROWS_AS(align(traj({100, 100}, 0.01), traj({100, 100}, 0.02), 1), Error);
}

TEST_CASE("csv format and parse") {
  const F0Trajectory t = traj({0, 110.5, 120.25}, 0.01);
  CHECK(format_f0_csv(t) ==
        "time_s,f0_hz\n0.000000,0.000000\n0.010000,110.500000\n0.020000,120.250000\n");

  std::istringstream header_only("time_s,f0_hz\n");
  try {
    parse_f0_csv(header_only, "x");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmpty);
  }

  std::istringstream bad("time_s,f0_hz\n0.000000,100\n0.010,not_a_number\n");
  try {
    parse_f0_csv(bad, "x");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  std::istringstream columns("time_s,f0_hz\n0.0,1,2\n");
  CHECK_THROWS_AS(parse_f0_csv(columns, "x"), Error);
  std::istringstream no_header("0.0,100\n");
  CHECK_THROWS_AS(parse_f0_csv(no_header, "x"), Error);
  std::istringstream crlf("time_s,f0_hz\r\n0.000000,100.000000\r\n0.005000,0.000000\r\n");
  const F0Trajectory c = parse_f0_csv(crlf, "x");
  CHECK(c.frame_hop == 0.005);
  CHECK(c.size() == 2);
}

TEST_CASE("csv round trip is lossless at written precision") {
  std::mt19937_64 rng(23);
  const auto dir = f0priv::testing::scratch_dir("csv_roundtrip");
  for (int trial = 0; trial < 40; ++trial) {
    const double hop = std::round(f0priv::testing::uniform(rng, 0.004, 0.02) * 1e6) / 1e6;
    F0Trajectory t = f0priv::testing::random_trajectory(rng, 1 + trial * 13, hop, "r" + std::to_string(trial));
    // quantize to the written precision
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", t.values[i]);
      t.values[i] = std::strtod(buf, nullptr);
    }
    const auto path = dir / (t.recording_id + ".csv");
    write_f0_csv(t, path);
    const F0Trajectory back = read_f0_csv(path, hop);
    CHECK(back.recording_id == t.recording_id);
    CHECK(back.frame_hop == t.frame_hop);
    REQUIRE(back.size() == t.size());
    CHECK((back.values == t.values).all());
  }
}
