#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rapd/protocol.hpp"
#include "rapd/session.hpp"
#include "rapd/signal.hpp"
#include "rapd/units.hpp"

namespace rapd {

/// Which constriction amplitude feeds the per-level ratio.
enum class CaMode {
  Averaged,    // mean of direct and consensual response (default)
  DirectOnly,  // illuminated eye's own pupil only
};

struct CaMeasurement {
  LogUnits level_x;
  int level_index = 0;
  int repetition = 0;
  Eye illuminated_eye = Eye::Right;
  std::size_t interval_index = 0;
  double ca_direct = 0.0;
  double ca_consensual = 0.0;
  double ca_mean = 0.0;

  double value(CaMode mode) const noexcept {
    return mode == CaMode::DirectOnly ? ca_direct : ca_mean;
  }
};

struct LevelScore {
  LogUnits level_x;
  LogUnits score;
  double ca_right_illum = 0.0;
  double ca_left_illum = 0.0;
};

struct RapdLine {
  double slope = 0.0;
  double y_intercept = 0.0;
};

enum class Classification { Negative, PositiveLeft, PositiveRight };

const char* to_string(Classification c) noexcept;
Classification classification_from_string(const std::string& s);

constexpr double kRapdThreshold = 0.3;
constexpr double kSlopeFloor = 1e-6;

struct DroppedLevel {
  int level_index = 0;
  LogUnits level_x;
  std::string reason;
};

struct PipelineParams {
  SignalParams signal;
  CaMode ca_mode = CaMode::Averaged;
};

struct RapdReport {
  std::vector<LevelScore> level_scores;
  double slope = 0.0;
  double y_intercept = 0.0;
  LogUnits final_score;
  Classification classification = Classification::Negative;
  std::vector<DroppedLevel> dropped_levels;
  std::vector<std::size_t> dropped_intervals;
  std::vector<std::size_t> censored_intervals;
  std::size_t removed_rows = 0;
  PipelineParams params;
};

std::vector<CaMeasurement> compute_ca(std::span<const IntervalWindow> windows);

/// Average the repetitions of one level per illuminated eye, then apply the
/// 10 log10 ratio. Raises LevelDropout when one side has no measurements.
LevelScore aggregate_level(std::span<const CaMeasurement> measurements, LogUnits level_x,
                           CaMode mode = CaMode::Averaged);

/// Ordinary least squares of score against level_x.
RapdLine fit_rapd_line(std::span<const LevelScore> level_scores);

/// x-intercept of the fitted line, -y_intercept / slope.
LogUnits final_rapd_score(double slope, double y_intercept);

/// |score| < 0.3 is negative; <= -0.3 is a left-eye defect, >= +0.3 right.
Classification classify(LogUnits final_score);

/// Full pipeline for one recording.
RapdReport score_session(const Session& session, const Schedule& schedule,
                         const PipelineParams& params = {});

}  // namespace rapd
