#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rapd/protocol.hpp"
#include "rapd/session.hpp"

namespace rapd {

using RowMask = std::vector<bool>;

struct SignalParams {
  int blink_window = 11;              // samples, odd, >= 3
  double blink_velocity = 10.0;       // mm/s
  double smooth_sigma = 6.0;          // samples
  double min_retained_fraction = 0.25;
  int censor_guard = 2;  // rows; see segment_intervals
};

/// Flag blink rows: either diameter <= 0, or either diameter's central
/// difference across the sliding window exceeding velocity_limit. Flagged runs
/// are widened by window/2 rows on each side to take out blink shoulders.
RowMask detect_blinks(const Session& session, int window, double velocity_limit);

/// Keep rows whose mask entry is false. Timestamps are kept as recorded.
Session remove_rows(const Session& session, const RowMask& mask);

/// Normalised Gaussian convolution, kernel truncated at ceil(3 sigma). Near
/// the ends the kernel is renormalised over the samples that exist.
std::vector<double> gaussian_smooth(std::span<const double> series, double sigma = 6.0);

struct CleanSession {
  Session session;  // retained rows, raw diameters
  std::size_t removed_rows = 0;
  double nominal_sample_rate = 0.0;  // Hz, from the uncleaned recording
  std::vector<double> smooth_right;
  std::vector<double> smooth_left;
};

/// Rows that follow a removed stretch: indices i with
/// timestamps[i] - timestamps[i - 1] above 1.5 sample periods.
std::vector<std::size_t> gap_starts(std::span<const double> timestamps, double sample_rate);

/// detect_blinks -> remove_rows -> gaussian_smooth on both pupils. Each
/// stretch between removed rows is smoothed separately.
CleanSession clean_session(const Session& session, const SignalParams& params);

/// Per-eye extremes inside one illumination interval.
struct PupilExtremes {
  double max_diameter = 0.0;
  double min_diameter = 0.0;
  std::size_t max_row = 0;  // row in the clean session
  std::size_t min_row = 0;
};

struct IntervalWindow {
  std::size_t interval_index = 0;
  int level_index = 0;
  int repetition_index = 0;
  Eye illuminated_eye = Eye::Right;
  LogUnits level_x;
  std::size_t begin = 0;  // [begin, end) rows of the clean session
  std::size_t end = 0;
  PupilExtremes right;
  PupilExtremes left;

  const PupilExtremes& pupil(Eye e) const noexcept { return e == Eye::Right ? right : left; }
};

struct SegmentResult {
  std::vector<IntervalWindow> windows;
  std::vector<std::size_t> dropped_intervals;  // too few samples left
  // Blink removal cut into the response, so an extreme may have been lost.
  std::vector<std::size_t> censored_intervals;
};

/// One window per interval. The maximum is searched in the first half of the
/// interval (the pupil is largest at light onset), the minimum over the whole
/// interval. Intervals keeping fewer than min_retained_fraction of their
/// expected samples are listed in dropped_intervals instead. A window with
/// removed rows between light onset and its later extreme (widened by
/// `censor_guard` rows) is listed in censored_intervals.
SegmentResult segment_intervals(const CleanSession& session, const Schedule& schedule,
                                double min_retained_fraction = 0.25, int censor_guard = 2);

/// As segment_intervals, but the first dropped interval raises
/// ErrorCode::IntervalDropout.
std::vector<IntervalWindow> segment(const CleanSession& session, const Schedule& schedule,
                                    double min_retained_fraction = 0.25);

}  // namespace rapd
