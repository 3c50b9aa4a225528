#include "rapd/scoring.hpp"

#include <cmath>

#include <fmt/format.h>

#include "rapd/error.hpp"

namespace rapd {

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Negative: return "negative";
    case Classification::PositiveLeft: return "positive_left";
    case Classification::PositiveRight: return "positive_right";
  }
  return "negative";
}

Classification classification_from_string(const std::string& s) {
  if (s == "negative") return Classification::Negative;
  if (s == "positive_left") return Classification::PositiveLeft;
  if (s == "positive_right") return Classification::PositiveRight;
  fail(ErrorCode::Parse, fmt::format("unknown classification '{}'", s));
}

std::vector<CaMeasurement> compute_ca(std::span<const IntervalWindow> windows) {
  std::vector<CaMeasurement> out;
  out.reserve(windows.size());
  for (const IntervalWindow& w : windows) {
    const auto ca = [&](Eye e) {
      const PupilExtremes& p = w.pupil(e);
      try {
        return percent_change_ca(p.max_diameter, p.min_diameter);
      } catch (const Error& err) {
        fail(err.code(), fmt::format("interval {} ({} pupil): {}", w.interval_index,
                                     to_string(e), err.what()));
      }
    };
    CaMeasurement m;
    m.level_x = w.level_x;
    m.level_index = w.level_index;
    m.repetition = w.repetition_index;
    m.illuminated_eye = w.illuminated_eye;
    m.interval_index = w.interval_index;
    m.ca_direct = ca(w.illuminated_eye);
    m.ca_consensual = ca(other(w.illuminated_eye));
    m.ca_mean = (m.ca_direct + m.ca_consensual) / 2.0;
    out.push_back(m);
  }
  return out;
}

LevelScore aggregate_level(std::span<const CaMeasurement> measurements, LogUnits level_x,
                           CaMode mode) {
  double sum_right = 0.0;
  double sum_left = 0.0;
  int n_right = 0;
  int n_left = 0;
  for (const CaMeasurement& m : measurements) {
    if (std::abs(m.level_x.value - level_x.value) > 1e-9) continue;
    if (m.illuminated_eye == Eye::Right) {
      sum_right += m.value(mode);
      ++n_right;
    } else {
      sum_left += m.value(mode);
      ++n_left;
    }
  }
  if (n_right == 0 || n_left == 0) {
    fail(ErrorCode::LevelDropout,
         fmt::format("level x={:+.2f} has no usable {} eye repetitions", level_x.value,
                     n_right == 0 ? "right" : "left"));
  }
  LevelScore s;
  s.level_x = level_x;
  s.ca_right_illum = sum_right / n_right;
  s.ca_left_illum = sum_left / n_left;
  s.score = rapd_score_from_ca(s.ca_right_illum, s.ca_left_illum);
  return s;
}

RapdLine fit_rapd_line(std::span<const LevelScore> level_scores) {
  std::vector<const LevelScore*> usable;
  for (const LevelScore& s : level_scores) {
    if (std::isfinite(s.level_x.value) && std::isfinite(s.score.value)) usable.push_back(&s);
  }
  if (usable.size() < 2) {
    fail(ErrorCode::InsufficientData,
         fmt::format("regression needs at least 2 scored levels, have {}", usable.size()));
  }
  const auto n = static_cast<double>(usable.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const LevelScore* s : usable) {
    mean_x += s->level_x.value;
    mean_y += s->score.value;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const LevelScore* s : usable) {
    const double dx = s->level_x.value - mean_x;
    sxx += dx * dx;
    sxy += dx * (s->score.value - mean_y);
  }
  if (!(sxx > 0.0)) {
    fail(ErrorCode::DegenerateFit, "all scored levels share the same illumination difference");
  }
  RapdLine line;
  line.slope = sxy / sxx;
  line.y_intercept = mean_y - line.slope * mean_x;
  return line;
}

LogUnits final_rapd_score(double slope, double y_intercept) {
  if (!(std::abs(slope) >= kSlopeFloor)) {
    fail(ErrorCode::FlatResponse,
         fmt::format("regression slope {} is flat: the pupillary response does not track the "
                     "attenuation",
                     slope));
  }
  return LogUnits{-y_intercept / slope};
}

Classification classify(LogUnits final_score) {
  const double s = final_score.value;
  if (std::isnan(s)) fail(ErrorCode::Domain, "cannot classify a NaN score");
  if (s <= -kRapdThreshold) return Classification::PositiveLeft;
  if (s >= kRapdThreshold) return Classification::PositiveRight;
  return Classification::Negative;
}

RapdReport score_session(const Session& session, const Schedule& schedule,
                         const PipelineParams& params) {
  const auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      fail(e.code(), fmt::format("{}: {}", name, e.what()));
    }
  };

  RapdReport report;
  report.params = params;

  const CleanSession clean = stage("blink removal", [&] { return clean_session(session, params.signal); });
  report.removed_rows = clean.removed_rows;

  SegmentResult seg = stage("segmentation", [&] {
    return segment_intervals(clean, schedule, params.signal.min_retained_fraction,
                             params.signal.censor_guard);
  });
  report.dropped_intervals = seg.dropped_intervals;
  report.censored_intervals = seg.censored_intervals;

  const std::vector<CaMeasurement> ca = stage("constriction amplitude", [&] {
    return compute_ca(seg.windows);
  });

  for (std::size_t li = 0; li < schedule.blocks.size(); ++li) {
    const LevelBlock& b = schedule.blocks[li];
    try {
      report.level_scores.push_back(aggregate_level(ca, b.x_level, params.ca_mode));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LevelDropout && e.code() != ErrorCode::UnresolvableScore) throw;
      report.dropped_levels.push_back(DroppedLevel{static_cast<int>(li), b.x_level, e.what()});
    }
  }

  const RapdLine line = stage("regression", [&] { return fit_rapd_line(report.level_scores); });
  report.slope = line.slope;
  report.y_intercept = line.y_intercept;
  report.final_score = stage("final score", [&] { return final_rapd_score(line.slope, line.y_intercept); });
  report.classification = classify(report.final_score);
  return report;
}

}  // namespace rapd
