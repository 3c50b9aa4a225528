#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rapd/units.hpp"

namespace rapd {

enum class Eye { Right, Left };

constexpr Eye other(Eye e) noexcept { return e == Eye::Right ? Eye::Left : Eye::Right; }
const char* to_string(Eye e) noexcept;
Eye eye_from_string(const std::string& s);

/// One illumination level of the swinging-light sequence.
///
/// x_level = OD(left) - OD(right). Attenuating the right eye gives negative x,
/// so a left-eye defect balances (and the fitted line crosses zero) at x < 0.
struct LevelBlock {
  LogUnits x_level;
  OpticalDensity od_right;  // applied while the right eye is lit
  OpticalDensity od_left;   // applied while the left eye is lit
  int repetitions = 3;
};

struct IlluminationInterval {
  double start = 0.0;     // s
  double duration = 0.0;  // s
  Eye illuminated_eye = Eye::Right;
  Transmittance transmittance;  // of the lit eye; the other eye is dark
  int level_index = 0;
  int repetition_index = 0;
  LogUnits level_x;

  double end() const noexcept { return start + duration; }
};

/// Fixation target shown throughout the run. Descriptive only: it is not a
/// light source and plays no part in analysis.
struct FixationTarget {
  std::string description = "red X on a 75 cm x 75 cm plane, receding from 2 m to 100 m";
  double plane_size_m = 0.75;
  double start_distance_m = 2.0;
  double end_distance_m = 100.0;
};

struct Schedule {
  double dark_adaptation = 5.0;  // s
  double pause = 3.0;            // s
  std::vector<LevelBlock> blocks;
  std::vector<IlluminationInterval> intervals;
  double total_duration = 0.0;  // s
  FixationTarget target;
  std::vector<std::string> warnings;
};

/// Per-eye transmittance at an instant; 0 means the eye is dark.
struct EyeIllumination {
  double left = 0.0;
  double right = 0.0;
};

constexpr double kDarkAdaptationSeconds = 5.0;
constexpr double kMinimumPauseSeconds = 2.0;

/// Built-in protocol: levels x = 0, -0.3, -0.6, +0.3, +0.6, each repeated three
/// times as strict R,L alternation starting from the right eye.
/// Pause 3 s is protocol-1 (95 s total), pause 2 s is protocol-2 (65 s).
Schedule build_protocol(double pause);

/// Protocol number (1 or 2) to pause time.
double protocol_pause(int protocol);

/// Builder for non-standard schedules. Enforces the structural invariants of
/// build_protocol but only warns about pauses shorter than 2 s.
class ScheduleBuilder {
 public:
  ScheduleBuilder& pause(double seconds);
  ScheduleBuilder& dark_adaptation(double seconds);
  ScheduleBuilder& first_eye(Eye eye);
  ScheduleBuilder& add_level(OpticalDensity od_right, OpticalDensity od_left,
                             int repetitions = 3);
  Schedule build() const;

 private:
  double pause_ = 3.0;
  double dark_ = kDarkAdaptationSeconds;
  Eye first_ = Eye::Right;
  std::vector<LevelBlock> blocks_;
};

EyeIllumination illumination_at(const Schedule& schedule, double t);

/// Index of the interval that owns time t, or -1 during dark adaptation and
/// at/after the end of the run.
std::ptrdiff_t interval_index_at(const Schedule& schedule, double t);

/// Left/right swapped schedule: eyes exchanged and x negated.
Schedule mirror_schedule(const Schedule& schedule);

/// Rebuild blocks/total from an interval list (used by the JSON reader).
Schedule schedule_from_intervals(double pause, double dark_adaptation,
                                 std::vector<IlluminationInterval> intervals);

}  // namespace rapd
