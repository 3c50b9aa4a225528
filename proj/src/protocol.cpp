#include "rapd/protocol.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rapd/error.hpp"

namespace rapd {

const char* to_string(Eye e) noexcept { return e == Eye::Right ? "right" : "left"; }

Eye eye_from_string(const std::string& s) {
  if (s == "right") return Eye::Right;
  if (s == "left") return Eye::Left;
  fail(ErrorCode::Parse, fmt::format("unknown eye '{}'", s));
}

namespace {

void check_block(const LevelBlock& b) {
  if (b.od_right.value < 0.0 || b.od_left.value < 0.0 || !std::isfinite(b.od_right.value) ||
      !std::isfinite(b.od_left.value)) {
    fail(ErrorCode::Protocol, "level optical densities must be finite and >= 0");
  }
  if (b.od_right.value > 0.0 && b.od_left.value > 0.0) {
    fail(ErrorCode::Protocol,
         fmt::format("level attenuates both eyes (OD right {}, left {}); only one eye "
                     "may carry a filter",
                     b.od_right.value, b.od_left.value));
  }
  if (b.repetitions < 1) {
    fail(ErrorCode::Protocol, "level repetitions must be >= 1");
  }
}

Schedule assemble(double pause, double dark, Eye first, std::vector<LevelBlock> blocks) {
  if (!(pause > 0.0) || !std::isfinite(pause)) {
    fail(ErrorCode::Protocol, fmt::format("pause must be > 0 s, got {}", pause));
  }
  if (!(dark >= 0.0) || !std::isfinite(dark)) {
    fail(ErrorCode::Protocol, fmt::format("dark adaptation must be >= 0 s, got {}", dark));
  }
  if (blocks.empty()) {
    fail(ErrorCode::Protocol, "schedule has no levels");
  }
  Schedule s;
  s.pause = pause;
  s.dark_adaptation = dark;
  std::size_t slot = 0;
  for (std::size_t li = 0; li < blocks.size(); ++li) {
    const LevelBlock& b = blocks[li];
    check_block(b);
    for (int rep = 0; rep < b.repetitions; ++rep) {
      for (Eye eye : {first, other(first)}) {
        IlluminationInterval iv;
        // Multiply rather than accumulate so boundaries are reproducible.
        iv.start = dark + static_cast<double>(slot) * pause;
        iv.duration = pause;
        iv.illuminated_eye = eye;
        iv.transmittance =
            od_to_transmittance(eye == Eye::Right ? b.od_right : b.od_left);
        iv.level_index = static_cast<int>(li);
        iv.repetition_index = rep;
        iv.level_x = b.x_level;
        s.intervals.push_back(iv);
        ++slot;
      }
    }
  }
  s.total_duration = dark + static_cast<double>(slot) * pause;
  s.blocks = std::move(blocks);
  return s;
}

LevelBlock make_block(double od_right, double od_left, int reps) {
  return LevelBlock{LogUnits{od_left - od_right}, OpticalDensity{od_right},
                    OpticalDensity{od_left}, reps};
}

}  // namespace

Schedule build_protocol(double pause) {
  if (!(pause >= kMinimumPauseSeconds) || !std::isfinite(pause)) {
    fail(ErrorCode::Protocol,
         fmt::format("pause {} s is below the {} s minimum: shorter pauses leave the pupils "
                     "no time to redilate before the next stimulus",
                     pause, kMinimumPauseSeconds));
  }
  std::vector<LevelBlock> blocks = {
      make_block(0.0, 0.0, 3),  // both eyes 100%
      make_block(0.3, 0.0, 3),  // right 50%
      make_block(0.6, 0.0, 3),  // right 25%
      make_block(0.0, 0.3, 3),  // left 50%
      make_block(0.0, 0.6, 3),  // left 25%
  };
  return assemble(pause, kDarkAdaptationSeconds, Eye::Right, std::move(blocks));
}

double protocol_pause(int protocol) {
  switch (protocol) {
    case 1: return 3.0;
    case 2: return 2.0;
    default:
      fail(ErrorCode::InvalidArgument,
           fmt::format("unknown protocol {} (expected 1 or 2)", protocol));
  }
}

ScheduleBuilder& ScheduleBuilder::pause(double seconds) {
  pause_ = seconds;
  return *this;
}

ScheduleBuilder& ScheduleBuilder::dark_adaptation(double seconds) {
  dark_ = seconds;
  return *this;
}

ScheduleBuilder& ScheduleBuilder::first_eye(Eye eye) {
  first_ = eye;
  return *this;
}

ScheduleBuilder& ScheduleBuilder::add_level(OpticalDensity od_right, OpticalDensity od_left,
                                            int repetitions) {
  blocks_.push_back(make_block(od_right.value, od_left.value, repetitions));
  return *this;
}

Schedule ScheduleBuilder::build() const {
  Schedule s = assemble(pause_, dark_, first_, blocks_);
  if (pause_ < kMinimumPauseSeconds) {
    s.warnings.push_back(fmt::format(
        "pause {} s is below {} s; pupils may not redilate between stimuli", pause_,
        kMinimumPauseSeconds));
  }
  return s;
}

std::ptrdiff_t interval_index_at(const Schedule& schedule, double t) {
  const auto& ivs = schedule.intervals;
  // First interval whose start is > t; the owner is the one before it.
  auto it = std::upper_bound(ivs.begin(), ivs.end(), t,
                             [](double v, const IlluminationInterval& iv) { return v < iv.start; });
  if (it == ivs.begin()) return -1;
  --it;
  if (t >= it->end()) return -1;
  return it - ivs.begin();
}

EyeIllumination illumination_at(const Schedule& schedule, double t) {
  if (!(t >= 0.0 && t <= schedule.total_duration)) {
    fail(ErrorCode::Range, fmt::format("time {} s is outside the schedule [0, {}]", t,
                                       schedule.total_duration));
  }
  EyeIllumination out;
  const auto idx = interval_index_at(schedule, t);
  if (idx < 0) return out;
  const auto& iv = schedule.intervals[static_cast<std::size_t>(idx)];
  (iv.illuminated_eye == Eye::Right ? out.right : out.left) = iv.transmittance.value;
  return out;
}

Schedule mirror_schedule(const Schedule& schedule) {
  Schedule m = schedule;
  for (auto& b : m.blocks) {
    std::swap(b.od_right, b.od_left);
    b.x_level.value = -b.x_level.value;
  }
  for (auto& iv : m.intervals) {
    iv.illuminated_eye = other(iv.illuminated_eye);
    iv.level_x.value = -iv.level_x.value;
  }
  return m;
}

Schedule schedule_from_intervals(double pause, double dark_adaptation,
                                 std::vector<IlluminationInterval> intervals) {
  if (intervals.empty()) {
    fail(ErrorCode::Protocol, "schedule has no intervals");
  }
  Schedule s;
  s.pause = pause;
  s.dark_adaptation = dark_adaptation;
  double expected_start = dark_adaptation;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    if (std::abs(iv.start - expected_start) > 1e-9 || !(iv.duration > 0.0)) {
      fail(ErrorCode::Protocol,
           fmt::format("interval {} is not contiguous with its predecessor", i));
    }
    if (!(iv.transmittance.value > 0.0 && iv.transmittance.value <= 1.0)) {
      fail(ErrorCode::Protocol, fmt::format("interval {} transmittance out of (0, 1]", i));
    }
    expected_start = iv.end();
    const auto li = static_cast<std::size_t>(iv.level_index);
    if (iv.level_index < 0 || li > s.blocks.size()) {
      fail(ErrorCode::Protocol, fmt::format("interval {} has out-of-order level index", i));
    }
    if (li == s.blocks.size()) {
      s.blocks.push_back(LevelBlock{iv.level_x, OpticalDensity{}, OpticalDensity{}, 0});
    }
    auto& b = s.blocks[li];
    const double od = transmittance_to_od(iv.transmittance).value;
    (iv.illuminated_eye == Eye::Right ? b.od_right : b.od_left).value = od;
    b.repetitions = std::max(b.repetitions, iv.repetition_index + 1);
  }
  s.total_duration = expected_start;
  s.intervals = std::move(intervals);
  return s;
}

}  // namespace rapd
