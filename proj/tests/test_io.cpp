#include <cmath>
#include <filesystem>
#include <sstream>

#include <doctest.h>

#include "support.hpp"
#include "rapd/formats.hpp"
#include "rapd/plot.hpp"
#include "rapd/session_io.hpp"

using namespace rapd;
using testing::code_of;
using testing::kVive;

namespace {

Session parse(const std::string& text) {
  std::istringstream in(text);
  return parse_session(in, "mem.csv");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

std::string format(const Session& s) {
  std::ostringstream out;
  format_session(s, out);
  return out.str();
}

const std::string kHeader = "timestamp,illum_right,illum_left,pupil_right,pupil_left\n";

}  // namespace

TEST_CASE("reading session files") {
  const auto s = parse(kHeader +
                       "0.000000,0.000000,0.000000,6.1000,6.0000\n"
                       "0.008333,1.000000,0.000000,6.0500,5.9500\n"
                       "0.016667,1.000000,0.000000,0.0000,0.0000\n");
  CHECK(s.size() == 3);
  CHECK(s.illum_right[1] == 1.0);
  CHECK(s.pupil_left[0] == 6.0);
  CHECK(s.pupil_right[2] == kBlinkSentinel);
}

TEST_CASE("malformed session files name the line") {
  CHECK(parse_error(kHeader + "0,0,0,6,6\n0.1,0,0,6\n").find("mem.csv:3") != std::string::npos);
  CHECK(parse_error(kHeader + "0,0,0,6,6,1\n").find(":2") != std::string::npos);
  CHECK(parse_error(kHeader + "0,0,0,six,6\n").find(":2") != std::string::npos);
  CHECK(parse_error(kHeader + "0.1,0,0,6,6\n0.1,0,0,6,6\n").find(":3") != std::string::npos);
  CHECK(parse_error(kHeader + "0,1.5,0,6,6\n").find(":2") != std::string::npos);
  CHECK(parse_error("time,a,b,c,d\n").find(":1") != std::string::npos);
  CHECK(parse_error("").find("mem.csv") != std::string::npos);
}

TEST_CASE("empty session writes a header-only file") {
  CHECK(format(Session{}) == kHeader);
  CHECK(parse(kHeader).empty());
}

TEST_CASE("write/read roundtrip within printed precision") {
  PupilModelParams p;
  p.noise_sd = 0.05;
  p.blink_rate = 0.2;
  p.rng_seed = 5;
  const auto s = simulate_session(p, build_protocol(2.0), kVive);
  const std::string text = format(s);
  CHECK(format(s) == text);
  std::istringstream in(text);
  const auto r = parse_session(in);
  REQUIRE(r.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    REQUIRE(std::abs(r.timestamp[k] - s.timestamp[k]) <= 5e-7);
    REQUIRE(std::abs(r.illum_right[k] - s.illum_right[k]) <= 5e-7);
    REQUIRE(std::abs(r.pupil_right[k] - s.pupil_right[k]) <= 5e-5);
    REQUIRE(std::abs(r.pupil_left[k] - s.pupil_left[k]) <= 5e-5);
  }
  // Re-emitting a parsed file reproduces it byte for byte.
  CHECK(format(r) == text);
}

TEST_CASE("file IO errors") {
  CHECK(code_of([] { read_session("/nonexistent/session.csv"); }) == ErrorCode::Io);
  CHECK(code_of([] { write_text_file("/nonexistent/dir/x.txt", "x"); }) == ErrorCode::Io);
}

TEST_CASE("calibration samples file") {
  const auto path = (std::filesystem::temp_directory_path() / "rapd_cal.csv").string();
  write_text_file(path, "drive,luminance\n0.25,42.35\n0.5,70.1\n1,97.8\n");
  const auto s = read_calibration_samples(path);
  REQUIRE(s.size() == 3);
  CHECK(s[1].drive == 0.5);
  CHECK(s[2].luminance == 97.8);
  write_text_file(path, "drive,lum\n1,2\n");
  CHECK(code_of([&] { read_calibration_samples(path); }) == ErrorCode::Parse);
  std::filesystem::remove(path);
}

TEST_CASE("schedule JSON roundtrip") {
  const auto s = build_protocol(3.0);
  CalibrationModel cal;
  cal.offset_a = 97.8;
  cal.slope_b = 40.0;
  cal.reference_luminance = 97.8;
  const Json j = schedule_to_json(s, &cal);
  CHECK(j["pause_s"] == 3.0);
  CHECK(j["total_s"] == 95.0);
  CHECK(j["intervals"].size() == 30);
  CHECK(j["intervals"][0]["eye"] == "right");
  CHECK(j["intervals"][7].contains("drive"));
  const auto back = schedule_from_json(j);
  CHECK(back.total_duration == s.total_duration);
  REQUIRE(back.intervals.size() == 30);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(back.intervals[i].start == s.intervals[i].start);
    CHECK(back.intervals[i].illuminated_eye == s.intervals[i].illuminated_eye);
    CHECK(back.intervals[i].transmittance.value == s.intervals[i].transmittance.value);
    CHECK(back.intervals[i].level_index == s.intervals[i].level_index);
  }
  CHECK(back.blocks.size() == 5);
  CHECK(dump(schedule_to_json(back)) == dump(schedule_to_json(s)));
  CHECK(code_of([] { schedule_from_json(Json::parse(R"({"pause_s": 3})")); }) == ErrorCode::Parse);
}

TEST_CASE("report JSON roundtrip") {
  PupilModelParams p;
  p.defect_left = 0.6;
  const auto sched = build_protocol(3.0);
  const auto r = score_session(simulate_session(p, sched, kVive), sched);
  const Json j = report_to_json(r);
  for (const char* key : {"level_scores", "slope", "y_intercept", "final_score", "classification",
                          "dropped_levels", "pipeline_params"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["level_scores"][0].contains("ca_right"));
  CHECK(j["classification"] == "positive_left");
  const auto back = report_from_json(j);
  CHECK(back.final_score.value == r.final_score.value);
  CHECK(back.slope == r.slope);
  CHECK(back.level_scores.size() == 5);
  CHECK(dump(report_to_json(back)) == dump(j));
}

TEST_CASE("calibration JSON roundtrip") {
  CalibrationModel m{1.5, 20.25, 0.998, 5.0, 33.9};
  const auto back = calibration_from_json(calibration_to_json(m));
  CHECK(back.offset_a == m.offset_a);
  CHECK(back.slope_b == m.slope_b);
  CHECK(back.reference_drive == m.reference_drive);
  CHECK(code_of([] { calibration_from_json(Json::parse("[]")); }) == ErrorCode::Parse);
}

TEST_CASE("regression plot") {
  RapdReport r;
  for (double x : {-0.6, -0.3, 0.0, 0.3, 0.6}) {
    r.level_scores.push_back({LogUnits{x}, LogUnits{2.0 * (x + 0.96)}, 0.2, 0.2});
  }
  r.slope = 2.0;
  r.y_intercept = 1.92;
  r.final_score = LogUnits{-0.96};
  r.classification = Classification::PositiveLeft;
  const std::string svg = regression_svg(r);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.size() > 7);
  CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
  CHECK(svg.find("-0.96") != std::string::npos);
  CHECK(svg.find("log units") != std::string::npos);
  std::size_t points = 0;
  for (auto at = svg.find("class=\"level\""); at != std::string::npos;
       at = svg.find("class=\"level\"", at + 1)) {
    ++points;
  }
  CHECK(points == 5);
  CHECK(svg.find("class=\"fit\"") != std::string::npos);
  CHECK(regression_svg(r) == svg);

  RapdReport unfitted;
  CHECK(code_of([&] { regression_svg(unfitted); }) == ErrorCode::InvalidArgument);
  PlotSpec spec;
  spec.kind = PlotKind::Regression;
  CHECK(code_of([&] { emit_plot(spec); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("trace plot marks the extremes of every interval") {
  PupilModelParams p;
  const auto sched = build_protocol(2.0);
  const auto s = simulate_session(p, sched, kVive);
  const std::string svg = trace_svg(s, sched);
  std::size_t dots = 0;
  for (auto at = svg.find("class=\"extremum\""); at != std::string::npos;
       at = svg.find("class=\"extremum\"", at + 1)) {
    ++dots;
  }
  CHECK(dots == 60);
  CHECK(svg.find("Timestamp (s)") != std::string::npos);
  CHECK(svg.find("Pupil diameter (mm)") != std::string::npos);
  CHECK(svg.find("pupil-right") != std::string::npos);
  CHECK(svg.find("pupil-left") != std::string::npos);
  CHECK(trace_svg(s, sched) == svg);
}
