#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "rapd/scoring.hpp"
#include "rapd/session.hpp"

using namespace rapd;
using testing::code_of;
using testing::kVive;
using testing::roundtrip;

namespace {

IntervalWindow window(Eye lit, double rmax, double rmin, double lmax, double lmin) {
  IntervalWindow w;
  w.illuminated_eye = lit;
  w.right = {rmax, rmin, 0, 0};
  w.left = {lmax, lmin, 0, 0};
  return w;
}

CaMeasurement measurement(Eye lit, double ca, double x = 0.0) {
  CaMeasurement m;
  m.illuminated_eye = lit;
  m.level_x = LogUnits{x};
  m.ca_direct = m.ca_consensual = m.ca_mean = ca;
  return m;
}

std::vector<LevelScore> points(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<LevelScore> out;
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back({LogUnits{x[i]}, LogUnits{y[i]}, 0, 0});
  return out;
}

const std::vector<double> kXs{-0.6, -0.3, 0.0, 0.3, 0.6};

}  // namespace

TEST_CASE("compute_ca") {
  const std::vector<IntervalWindow> w{
      window(Eye::Right, 6.0, 4.5, 6.0, 4.5),
      window(Eye::Right, 6.0, 4.5, 5.8, 4.35),
      window(Eye::Left, 6.0, 6.0, 6.0, 6.0),
      window(Eye::Left, 6.0, 5.4, 6.0, 4.5),
  };
  const auto ca = compute_ca(w);
  CHECK(ca[0].ca_direct == doctest::Approx(0.25));
  CHECK(ca[0].ca_consensual == doctest::Approx(0.25));
  CHECK(ca[1].ca_mean == doctest::Approx(0.25));
  CHECK(ca[2].ca_mean == 0.0);
  CHECK(ca[3].ca_direct == doctest::Approx(0.25));
  CHECK(ca[3].ca_consensual == doctest::Approx(0.10));
  CHECK(ca[3].ca_mean == doctest::Approx(0.175));
  CHECK(ca[3].value(CaMode::DirectOnly) == doctest::Approx(0.25));

  std::vector<IntervalWindow> bad{window(Eye::Left, 0.0, 0.0, 5.0, 4.0)};
  bad[0].interval_index = 13;
  try {
    compute_ca(bad);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
    CHECK(std::string(e.what()).find("interval 13") != std::string::npos);
  }
}

TEST_CASE("aggregate_level") {
  std::vector<CaMeasurement> m;
  for (int i = 0; i < 3; ++i) {
    m.push_back(measurement(Eye::Right, 0.25));
    m.push_back(measurement(Eye::Left, 0.25));
  }
  CHECK(aggregate_level(m, LogUnits{0.0}).score.value == 0.0);

  m = {measurement(Eye::Right, 0.30), measurement(Eye::Left, 0.15)};
  CHECK(std::abs(aggregate_level(m, LogUnits{0.0}).score.value - 3.0103) < 1e-4);

  // Repetitions are averaged before the log ratio.
  m = {measurement(Eye::Right, 0.2), measurement(Eye::Right, 0.25), measurement(Eye::Right, 0.3),
       measurement(Eye::Left, 0.25), measurement(Eye::Left, 0.25), measurement(Eye::Left, 0.25)};
  const auto l = aggregate_level(m, LogUnits{0.0});
  CHECK(std::abs(l.score.value) < 1e-12);
  CHECK(l.ca_right_illum == doctest::Approx(0.25));

  m = {measurement(Eye::Right, 0.3, 0.3), measurement(Eye::Left, 0.3, 0.0)};
  CHECK(code_of([&] { aggregate_level(m, LogUnits{0.3}); }) == ErrorCode::LevelDropout);
  m = {measurement(Eye::Right, 0.0), measurement(Eye::Left, 0.2)};
  CHECK(code_of([&] { aggregate_level(m, LogUnits{0.0}); }) == ErrorCode::UnresolvableScore);
}

TEST_CASE("fit_rapd_line") {
  auto line = fit_rapd_line(points(kXs, {-1.2, -0.6, 0.0, 0.6, 1.2}));
  CHECK(line.slope == doctest::Approx(2.0));
  CHECK(std::abs(line.y_intercept) < 1e-12);

  std::vector<double> ys;
  for (double x : kXs) ys.push_back(2.0 * (x + 0.96));
  line = fit_rapd_line(points(kXs, ys));
  CHECK(line.slope == doctest::Approx(2.0));
  CHECK(line.y_intercept == doctest::Approx(1.92));

  // One outlier at x = 0 (raw displacement 0.9): OLS gives slope 2, intercept
  // 0.18, so the x-intercept moves by 0.09.
  const std::vector<double> outlier{-1.2, -0.6, 0.9, 0.6, 1.2};
  line = fit_rapd_line(points(kXs, outlier));
  const auto [m, b] = oracle::ols(kXs, outlier);
  CHECK(line.slope == doctest::Approx(m));
  CHECK(line.y_intercept == doctest::Approx(b));
  CHECK(std::abs(final_rapd_score(line.slope, line.y_intercept).value) < 0.9);
  CHECK(final_rapd_score(line.slope, line.y_intercept).value == doctest::Approx(-0.09));

  CHECK(code_of([] { fit_rapd_line(points({0.3}, {1.0})); }) == ErrorCode::InsufficientData);
  CHECK(code_of([] { fit_rapd_line(points({0.3, 0.3, 0.3}, {1.0, 2.0, 3.0})); }) ==
        ErrorCode::DegenerateFit);
}

TEST_CASE("OLS agrees with the normal-equation oracle") {
  oracle::Gen g(2);
  for (int i = 0; i < 300; ++i) {
    const int n = g.integer(2, 12);
    std::vector<double> x(n), y(n);
    for (int k = 0; k < n; ++k) {
      x[k] = g.uniform(-1.5, 1.5);
      y[k] = g.uniform(-5, 5);
    }
    const auto line = fit_rapd_line(points(x, y));
    const auto [m, b] = oracle::ols(x, y);
    REQUIRE(line.slope == doctest::Approx(m).epsilon(1e-9));
    REQUIRE(line.y_intercept == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("final_rapd_score and classify") {
  CHECK(final_rapd_score(2.0, 0.0).value == 0.0);
  CHECK(final_rapd_score(2.0, 1.92).value == -0.96);
  CHECK(final_rapd_score(1.0, -0.49).value == 0.49);
  CHECK(code_of([] { final_rapd_score(1e-7, 1.0); }) == ErrorCode::FlatResponse);
  CHECK(classify(LogUnits{0.0}) == Classification::Negative);
  CHECK(classify(LogUnits{-0.96}) == Classification::PositiveLeft);
  CHECK(classify(LogUnits{0.49}) == Classification::PositiveRight);
  CHECK(classify(LogUnits{0.3}) == Classification::PositiveRight);
  CHECK(classify(LogUnits{-0.3}) == Classification::PositiveLeft);
  CHECK(classify(LogUnits{0.2999}) == Classification::Negative);
  CHECK(classification_from_string("positive_left") == Classification::PositiveLeft);
  CHECK(code_of([] { classification_from_string("maybe"); }) == ErrorCode::Parse);
}

TEST_CASE("x-intercept is invariant to positive scaling of the scores") {
  oracle::Gen g(6);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> y;
    for (std::size_t k = 0; k < kXs.size(); ++k) y.push_back(g.uniform(-4, 4) + 3 * kXs[k]);
    const double k = g.uniform(0.01, 100.0);
    std::vector<double> ky;
    for (double v : y) ky.push_back(k * v);
    const auto a = fit_rapd_line(points(kXs, y));
    const auto b = fit_rapd_line(points(kXs, ky));
    if (std::abs(a.slope) < 0.1) continue;
    REQUIRE(std::abs(final_rapd_score(a.slope, a.y_intercept).value -
                     final_rapd_score(b.slope, b.y_intercept).value) <= 1e-9);
  }
}

TEST_CASE("end-to-end oracle scenarios") {
  CHECK(std::abs(roundtrip(1, 0.0)) < 0.05);
  const double left = roundtrip(2, 0.6);
  CHECK(std::abs(left + 0.6) < 0.1);
  CHECK(classify(LogUnits{left}) == Classification::PositiveLeft);
  const double right = roundtrip(1, -0.3, 0.05, 0.2, 3);
  CHECK(std::abs(right - 0.3) < 0.2);
}

TEST_CASE("report contents") {
  PupilModelParams p;
  p.defect_right = 0.3;
  const auto sched = build_protocol(3.0);
  const auto r = score_session(simulate_session(p, sched, kVive), sched);
  REQUIRE(r.level_scores.size() == 5);
  CHECK(r.dropped_levels.empty());
  CHECK(r.final_score.value == doctest::Approx(-r.y_intercept / r.slope));
  CHECK(r.classification == classify(r.final_score));
  for (const auto& l : r.level_scores) {
    CHECK(l.score.value == doctest::Approx(10 * std::log10(l.ca_right_illum / l.ca_left_illum)));
  }
}

TEST_CASE("mirroring session and schedule negates the score") {
  const auto sched = build_protocol(3.0);
  const auto mirrored = mirror_schedule(sched);
  for (double d : {0.6, 0.96}) {
    PupilModelParams p;
    p.defect_left = d;
    const auto s = simulate_session(p, sched, kVive);
    const auto a = score_session(s, sched);
    const auto b = score_session(mirror_session(s), mirrored);
    CHECK(std::abs(a.final_score.value + b.final_score.value) <= 1e-6);
    CHECK(a.classification == Classification::PositiveLeft);
    CHECK(b.classification == Classification::PositiveRight);
  }
}

TEST_CASE("noise-free score is monotone in the defect") {
  for (int protocol : {1, 2}) {
    double prev_left = 1.0;
    double prev_right = -1.0;
    for (double d = 0.0; d <= 1.2001; d += 0.1) {
      const double left = roundtrip(protocol, d);
      const double right = roundtrip(protocol, -d);
      REQUIRE(left < prev_left);
      REQUIRE(right > prev_right);
      prev_left = left;
      prev_right = right;
    }
  }
}

TEST_CASE("a wiped level is dropped and the fit uses the rest") {
  PupilModelParams p;
  p.defect_left = 0.6;
  const auto sched = build_protocol(3.0);
  auto s = simulate_session(p, sched, kVive);
  // Blank every left-lit interval of the x = +0.6 level.
  for (const auto& iv : sched.intervals) {
    if (iv.level_index != 4 || iv.illuminated_eye != Eye::Left) continue;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s.timestamp[k] >= iv.start && s.timestamp[k] < iv.end()) s.pupil_right[k] = s.pupil_left[k] = 0.0;
    }
  }
  const auto r = score_session(s, sched);
  CHECK(r.dropped_intervals.size() == 3);
  REQUIRE(r.dropped_levels.size() == 1);
  CHECK(r.dropped_levels[0].level_index == 4);
  CHECK(r.level_scores.size() == 4);
  CHECK(std::abs(r.final_score.value + 0.6) < 0.15);
}

TEST_CASE("a flat recording fails with stage context") {
  const auto sched = build_protocol(2.0);
  Session s;
  for (int k = 0; k < 65 * 120; ++k) {
    const double t = k / 120.0;
    const auto e = illumination_at(sched, t);
    s.push_back(t, e.right, e.left, 5.0, 5.0);
  }
  try {
    score_session(s, sched);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
    CHECK(std::string(e.what()).find("regression") != std::string::npos);
  }
}
