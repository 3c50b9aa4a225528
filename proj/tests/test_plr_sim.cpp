#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "rapd/plr_sim.hpp"
#include "rapd/session.hpp"

using namespace rapd;
using testing::code_of;
using testing::kVive;

TEST_CASE("effective_drive") {
  PupilModelParams p;
  CHECK(effective_drive(p, 97.8, 0.0) == 97.8);
  p.defect_left = 0.3;
  CHECK(std::abs(effective_drive(p, 0.0, 97.8) - 49.0) < 0.3);
  p.defect_left = 0.6;
  CHECK(std::abs(effective_drive(p, 0.0, 97.2) - 24.4) < 0.3);
  CHECK(effective_drive(p, 0.0, 97.2) == doctest::Approx(97.2 * std::pow(10.0, -0.6)));
  CHECK(code_of([&] { effective_drive(p, -1.0, 0.0); }) == ErrorCode::Domain);
}

TEST_CASE("steady_state_diameter limits") {
  PupilModelParams p;
  CHECK(steady_state_diameter(p, 0.0) == p.d_max);
  CHECK(steady_state_diameter(p, p.half_luminance) == doctest::Approx((p.d_max + p.d_min) / 2));
  CHECK(steady_state_diameter(p, 1e9 * p.half_luminance) - p.d_min < 0.01);
  CHECK(code_of([&] { steady_state_diameter(p, -1.0); }) == ErrorCode::Domain);
}

TEST_CASE("steady_state_diameter is non-increasing for random parameters") {
  oracle::Gen g(17);
  for (int i = 0; i < 300; ++i) {
    PupilModelParams p;
    p.d_min = g.uniform(1.0, 4.0);
    p.d_max = p.d_min + g.uniform(0.5, 5.0);
    p.half_luminance = g.uniform(1.0, 500.0);
    p.steepness = g.uniform(0.1, 3.0);
    double prev = steady_state_diameter(p, 0.0);
    for (double drive = 0.01; drive < 1e6; drive *= 1.7) {
      const double d = steady_state_diameter(p, drive);
      REQUIRE(d <= prev);
      prev = d;
    }
  }
}

TEST_CASE("parameter validation") {
  PupilModelParams p;
  p.d_min = 8.0;
  CHECK(code_of([&] { validate(p); }) == ErrorCode::InvalidArgument);
  p = {};
  p.tau_constrict = 2.0;
  p.tau_dilate = 1.0;
  CHECK(code_of([&] { validate(p); }) == ErrorCode::InvalidArgument);
  p = {};
  p.noise_sd = -1.0;
  CHECK(code_of([&] { validate(p); }) == ErrorCode::InvalidArgument);
  p = {};
  CHECK(code_of([&] { simulate_session(p, build_protocol(3.0), 0.0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("simulated timeline") {
  const auto sched = build_protocol(2.0);
  PupilModelParams p;
  const auto s = simulate_session(p, sched, kVive);
  CHECK(s.size() == static_cast<std::size_t>(65.0 * 120.0));
  CHECK(s.timestamp[0] == 0.0);
  for (std::size_t k = 1; k < s.size(); ++k) {
    REQUIRE(s.timestamp[k] == doctest::Approx(k / 120.0).epsilon(1e-12));
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto e = illumination_at(sched, s.timestamp[k]);
    REQUIRE(s.illum_left[k] == e.left);
    REQUIRE(s.illum_right[k] == e.right);
  }
  CHECK(s.pupil_right[0] == p.d_max);
}

TEST_CASE("symmetric model gives identical pupils") {
  PupilModelParams p;
  const auto s = simulate_session(p, build_protocol(3.0), kVive);
  CHECK(s.pupil_left == s.pupil_right);
  p.anisocoria = 0.4;
  const auto a = simulate_session(p, build_protocol(3.0), kVive);
  for (std::size_t k = 0; k < a.size(); ++k) {
    REQUIRE(a.pupil_right[k] - a.pupil_left[k] == doctest::Approx(0.4));
  }
}

TEST_CASE("balanced light gives equal minima on each side") {
  // The first response starts from the fully dark pupil, so compare the
  // last repetition of the x = 0 level, where the response has settled.
  PupilModelParams p;
  const auto sched = build_protocol(3.0);
  const auto s = simulate_session(p, sched, kVive);
  auto window_min = [&](std::size_t i) {
    const auto& iv = sched.intervals[i];
    double m = 1e9;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s.timestamp[k] >= iv.start && s.timestamp[k] < iv.end()) m = std::min(m, s.pupil_right[k]);
    }
    return m;
  };
  CHECK(std::abs(window_min(4) - window_min(5)) < 1e-3);
}

TEST_CASE("diameters stay in bounds for random parameters") {
  oracle::Gen g(4);
  const auto sched = build_protocol(2.0);
  for (int i = 0; i < 25; ++i) {
    PupilModelParams p;
    p.d_min = g.uniform(1.5, 3.0);
    p.d_max = p.d_min + g.uniform(2.0, 5.0);
    p.noise_sd = g.uniform(0.0, 0.1);
    p.blink_rate = g.uniform(0.0, 0.5);
    p.anisocoria = g.uniform(-0.5, 0.5);
    p.defect_left = g.uniform(0.0, 1.2);
    p.rng_seed = static_cast<std::uint64_t>(i);
    const auto s = simulate_session(p, sched, kVive);
    const double slack = 3 * p.noise_sd + std::abs(p.anisocoria) / 2 + 1e-12;
    for (std::size_t k = 0; k < s.size(); ++k) {
      for (double d : {s.pupil_right[k], s.pupil_left[k]}) {
        if (d == kBlinkSentinel) continue;
        REQUIRE(d >= p.d_min - slack);
        REQUIRE(d <= p.d_max + slack);
      }
    }
  }
}

TEST_CASE("same seed, same session") {
  PupilModelParams p;
  p.noise_sd = 0.05;
  p.blink_rate = 0.3;
  p.rng_seed = 1234;
  const auto sched = build_protocol(3.0);
  const auto a = simulate_session(p, sched, kVive);
  const auto b = simulate_session(p, sched, kVive);
  CHECK(a.pupil_right == b.pupil_right);
  CHECK(a.pupil_left == b.pupil_left);
  p.rng_seed = 1235;
  CHECK(simulate_session(p, sched, kVive).pupil_right != a.pupil_right);
}

TEST_CASE("blinks write the sentinel to both eyes") {
  PupilModelParams p;
  p.blink_rate = 0.5;
  p.rng_seed = 9;
  const auto s = simulate_session(p, build_protocol(3.0), kVive);
  std::size_t zeros = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    REQUIRE((s.pupil_right[k] == 0.0) == (s.pupil_left[k] == 0.0));
    zeros += s.pupil_right[k] == 0.0;
  }
  // About 47 blinks of 24 samples each; allow wide slack for the Poisson draw.
  CHECK(zeros > 300);
  CHECK(zeros < 2500);
}

TEST_CASE("blinks do not perturb the noise stream") {
  PupilModelParams p;
  p.noise_sd = 0.05;
  p.rng_seed = 77;
  const auto sched = build_protocol(3.0);
  const auto clean = simulate_session(p, sched, kVive);
  p.blink_rate = 0.2;
  const auto blinky = simulate_session(p, sched, kVive);
  std::size_t differing = 0;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    if (blinky.pupil_right[k] == 0.0) continue;
    differing += blinky.pupil_right[k] != clean.pupil_right[k];
  }
  CHECK(differing == 0);
}

TEST_CASE("swapping the defect mirrors the session") {
  PupilModelParams p;
  p.defect_left = 0.6;
  const auto sched = build_protocol(3.0);
  const auto s = simulate_session(p, sched, kVive);
  PupilModelParams q;
  q.defect_right = 0.6;
  const auto m = simulate_session(q, mirror_schedule(sched), kVive);
  const auto mirrored = mirror_session(s);
  CHECK(m.pupil_right == mirrored.pupil_right);
  CHECK(m.pupil_left == mirrored.pupil_left);
  CHECK(m.illum_right == mirrored.illum_right);
}
