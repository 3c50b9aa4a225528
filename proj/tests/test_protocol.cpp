#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "rapd/protocol.hpp"

using namespace rapd;
using testing::code_of;

TEST_CASE("built-in protocols have the expected durations") {
  const auto p1 = build_protocol(3.0);
  const auto p2 = build_protocol(2.0);
  CHECK(p1.total_duration == 95.0);
  CHECK(p2.total_duration == 65.0);
  CHECK(p1.intervals.size() == 30);
  CHECK(p2.intervals.size() == 30);
  CHECK(p1.dark_adaptation == 5.0);
  CHECK(protocol_pause(1) == 3.0);
  CHECK(protocol_pause(2) == 2.0);
  CHECK(code_of([] { protocol_pause(3); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("level order and alternation") {
  const auto s = build_protocol(3.0);
  const double xs[] = {0.0, -0.3, -0.6, 0.3, 0.6};
  REQUIRE(s.blocks.size() == 5);
  for (int b = 0; b < 5; ++b) {
    CHECK(s.blocks[b].x_level.value == doctest::Approx(xs[b]));
    CHECK(s.blocks[b].repetitions == 3);
    // At most one eye is attenuated per block.
    CHECK((s.blocks[b].od_right.value == 0.0 || s.blocks[b].od_left.value == 0.0));
  }
  const auto& first = s.intervals.front();
  CHECK(first.start == 5.0);
  CHECK(first.illuminated_eye == Eye::Right);
  CHECK(first.transmittance.value == 1.0);
  CHECK(first.level_index == 0);
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    const auto& iv = s.intervals[i];
    CHECK(iv.illuminated_eye == (i % 2 == 0 ? Eye::Right : Eye::Left));
    CHECK(iv.level_index == static_cast<int>(i / 6));
    CHECK(iv.repetition_index == static_cast<int>((i % 6) / 2));
    CHECK(iv.duration == 3.0);
    if (i > 0) CHECK(iv.start == s.intervals[i - 1].end());
  }
  // x = -0.3: the right eye sees 50 %, the left eye full light.
  CHECK(std::abs(s.intervals[6].transmittance.value - 0.5012) < 1e-4);
  CHECK(s.intervals[7].transmittance.value == 1.0);
  // x = +0.6: the left eye sees 25 %.
  CHECK(s.intervals[24].transmittance.value == 1.0);
  CHECK(std::abs(s.intervals[25].transmittance.value - 0.2512) < 1e-4);
}

TEST_CASE("pauses under two seconds are rejected") {
  CHECK(code_of([] { build_protocol(1.5); }) == ErrorCode::Protocol);
  CHECK(code_of([] { build_protocol(0.0); }) == ErrorCode::Protocol);
  try {
    build_protocol(1.0);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("redilate") != std::string::npos);
  }
}

TEST_CASE("custom builder only warns about short pauses") {
  const auto s = ScheduleBuilder{}
                     .pause(1.0)
                     .add_level(OpticalDensity{0.0}, OpticalDensity{0.0}, 2)
                     .add_level(OpticalDensity{0.9}, OpticalDensity{0.0}, 2)
                     .build();
  CHECK(s.intervals.size() == 8);
  CHECK(s.total_duration == doctest::Approx(5.0 + 8.0));
  CHECK_FALSE(s.warnings.empty());
  CHECK(s.blocks[1].x_level.value == doctest::Approx(-0.9));
  CHECK(code_of([] {
          ScheduleBuilder{}.add_level(OpticalDensity{0.3}, OpticalDensity{0.3}).build();
        }) == ErrorCode::Protocol);
  CHECK(code_of([] { ScheduleBuilder{}.build(); }) == ErrorCode::Protocol);
}

TEST_CASE("illumination_at") {
  const auto s = build_protocol(3.0);
  auto at = [&](double t) { return illumination_at(s, t); };
  CHECK(at(0.0).left == 0.0);
  CHECK(at(2.0).left == 0.0);
  CHECK(at(2.0).right == 0.0);
  CHECK(at(5.0).right == 1.0);
  CHECK(at(5.0).left == 0.0);
  CHECK(at(8.0).left == 1.0);
  CHECK(at(8.0).right == 0.0);
  CHECK(at(7.999999).right == 1.0);
  CHECK(at(95.0).left == 0.0);
  CHECK(at(95.0).right == 0.0);
  CHECK(code_of([&] { at(-0.01); }) == ErrorCode::Range);
  CHECK(code_of([&] { at(95.01); }) == ErrorCode::Range);
  CHECK(interval_index_at(s, 4.9) == -1);
  CHECK(interval_index_at(s, 5.0) == 0);
  CHECK(interval_index_at(s, 8.0) == 1);
  CHECK(interval_index_at(s, 95.0) == -1);
}

TEST_CASE("dichoptic exclusivity and duration bookkeeping") {
  oracle::Gen g(8);
  for (double pause : {2.0, 3.0, 2.75}) {
    const auto s = build_protocol(pause);
    double sum = 0.0;
    for (const auto& iv : s.intervals) sum += iv.duration;
    CHECK(sum == doctest::Approx(s.total_duration - s.dark_adaptation).epsilon(1e-15));
    for (int i = 0; i < 3000; ++i) {
      const double t = g.uniform(0.0, s.total_duration);
      const auto e = illumination_at(s, t);
      REQUIRE((e.left == 0.0 || e.right == 0.0));
      if (t >= s.dark_adaptation) REQUIRE((e.left > 0.0 || e.right > 0.0));
    }
  }
}

TEST_CASE("mirroring swaps eyes and negates x") {
  const auto s = build_protocol(2.0);
  const auto m = mirror_schedule(s);
  REQUIRE(m.intervals.size() == s.intervals.size());
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    CHECK(m.intervals[i].illuminated_eye == other(s.intervals[i].illuminated_eye));
    CHECK(m.intervals[i].level_x.value == -s.intervals[i].level_x.value);
    CHECK(m.intervals[i].transmittance.value == s.intervals[i].transmittance.value);
  }
  const auto back = mirror_schedule(m);
  CHECK(back.intervals[9].illuminated_eye == s.intervals[9].illuminated_eye);
}

TEST_CASE("eye names") {
  CHECK(eye_from_string("left") == Eye::Left);
  CHECK(eye_from_string("right") == Eye::Right);
  CHECK(std::string(to_string(Eye::Left)) == "left");
  CHECK(code_of([] { eye_from_string("both"); }) == ErrorCode::Parse);
}
