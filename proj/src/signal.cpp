#include "rapd/signal.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rapd/error.hpp"

namespace rapd {

RowMask detect_blinks(const Session& session, int window, double velocity_limit) {
  if (session.empty()) {
    fail(ErrorCode::InvalidArgument, "blink detection on an empty session");
  }
  if (window < 3 || window % 2 == 0) {
    fail(ErrorCode::InvalidArgument,
         fmt::format("blink window must be odd and >= 3, got {}", window));
  }
  if (!(velocity_limit > 0.0)) {
    fail(ErrorCode::InvalidArgument,
         fmt::format("blink velocity limit must be > 0, got {}", velocity_limit));
  }
  const std::size_t n = session.size();
  const auto half = static_cast<std::size_t>(window / 2);
  RowMask hit(n, false);

  const auto too_fast = [&](const std::vector<double>& d, std::size_t i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    if (hi == lo) return false;
    const double slope = (d[hi] - d[lo]) / (session.timestamp[hi] - session.timestamp[lo]);
    return std::abs(slope) > velocity_limit;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (session.pupil_right[i] <= 0.0 || session.pupil_left[i] <= 0.0 ||
        too_fast(session.pupil_right, i) || too_fast(session.pupil_left, i)) {
      hit[i] = true;
    }
  }

  RowMask mask(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!hit[i]) continue;
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    for (std::size_t j = lo; j <= hi; ++j) mask[j] = true;
  }
  return mask;
}

Session remove_rows(const Session& session, const RowMask& mask) {
  if (mask.size() != session.size()) {
    fail(ErrorCode::InvalidArgument,
         fmt::format("mask has {} rows, session has {}", mask.size(), session.size()));
  }
  Session out;
  out.reserve(session.size());
  for (std::size_t i = 0; i < session.size(); ++i) {
    if (mask[i]) continue;
    out.push_back(session.timestamp[i], session.illum_right[i], session.illum_left[i],
                  session.pupil_right[i], session.pupil_left[i]);
  }
  return out;
}

std::vector<double> gaussian_smooth(std::span<const double> series, double sigma) {
  if (series.empty()) {
    fail(ErrorCode::InvalidArgument, "cannot smooth an empty series");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    fail(ErrorCode::InvalidArgument, fmt::format("sigma must be > 0, got {}", sigma));
  }
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    const double z = static_cast<double>(k) / sigma;
    kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * z * z);
  }

  const auto n = static_cast<std::ptrdiff_t>(series.size());
  std::vector<double> out(series.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - radius);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + radius);
    double acc = 0.0;
    double weight = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double w = kernel[static_cast<std::size_t>(j - i + radius)];
      acc += w * series[static_cast<std::size_t>(j)];
      weight += w;
    }
    out[static_cast<std::size_t>(i)] = acc / weight;
  }
  return out;
}

std::vector<std::size_t> gap_starts(std::span<const double> timestamps, double sample_rate) {
  std::vector<std::size_t> out;
  if (!(sample_rate > 0.0)) return out;
  const double limit = 1.5 / sample_rate;
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] - timestamps[i - 1] > limit) out.push_back(i);
  }
  return out;
}

CleanSession clean_session(const Session& session, const SignalParams& params) {
  validate(session);
  const RowMask mask = detect_blinks(session, params.blink_window, params.blink_velocity);
  CleanSession c;
  c.session = remove_rows(session, mask);
  c.removed_rows = session.size() - c.session.size();
  if (c.session.empty()) {
    fail(ErrorCode::InsufficientData, "blink removal left no usable rows");
  }
  if (session.size() >= 2) {
    c.nominal_sample_rate = static_cast<double>(session.size() - 1) /
                            (session.timestamp.back() - session.timestamp.front());
  }
  // Smooth each stretch between removed blinks on its own so the kernel never
  // mixes samples from either side of a gap.
  c.smooth_right.reserve(c.session.size());
  c.smooth_left.reserve(c.session.size());
  const auto gaps = gap_starts(c.session.timestamp, c.nominal_sample_rate);
  std::size_t from = 0;
  for (std::size_t k = 0; k <= gaps.size(); ++k) {
    const std::size_t to = k < gaps.size() ? gaps[k] : c.session.size();
    const auto run = [&](const std::vector<double>& d, std::vector<double>& out) {
      const auto sm = gaussian_smooth(std::span(d).subspan(from, to - from), params.smooth_sigma);
      out.insert(out.end(), sm.begin(), sm.end());
    };
    run(c.session.pupil_right, c.smooth_right);
    run(c.session.pupil_left, c.smooth_left);
    from = to;
  }
  return c;
}

namespace {

PupilExtremes extremes(const std::vector<double>& d, std::size_t begin, std::size_t onset_end,
                       std::size_t end) {
  PupilExtremes e;
  e.max_row = begin;
  for (std::size_t i = begin; i < onset_end; ++i) {
    if (d[i] > d[e.max_row]) e.max_row = i;
  }
  e.min_row = begin;
  for (std::size_t i = begin; i < end; ++i) {
    if (d[i] < d[e.min_row]) e.min_row = i;
  }
  e.max_diameter = d[e.max_row];
  e.min_diameter = d[e.min_row];
  return e;
}

}  // namespace

SegmentResult segment_intervals(const CleanSession& session, const Schedule& schedule,
                                double min_retained_fraction, int censor_guard) {
  const auto& ts = session.session.timestamp;
  if (ts.empty()) {
    fail(ErrorCode::InsufficientData, "segmenting an empty session");
  }
  if (session.smooth_right.size() != ts.size() || session.smooth_left.size() != ts.size()) {
    fail(ErrorCode::InvalidArgument, "smoothed series do not match the retained rows");
  }
  if (!(session.nominal_sample_rate > 0.0)) {
    fail(ErrorCode::InsufficientData, "session too short to infer its sample rate");
  }

  const auto gaps = gap_starts(ts, session.nominal_sample_rate);
  const double guard_s = std::max(censor_guard, 0) / session.nominal_sample_rate;
  // True when removed rows fall anywhere in [from, to].
  const auto gap_within = [&](double from, double to) {
    auto it = std::upper_bound(gaps.begin(), gaps.end(), from,
                               [&](double t, std::size_t j) { return t < ts[j]; });
    return it != gaps.end() && ts[*it - 1] < to;
  };

  SegmentResult result;
  for (std::size_t k = 0; k < schedule.intervals.size(); ++k) {
    const IlluminationInterval& iv = schedule.intervals[k];
    const auto lower = [&](double t) {
      return static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
    };
    const std::size_t begin = lower(iv.start);
    const std::size_t end = lower(iv.end());
    const std::size_t onset_end = lower(iv.start + iv.duration / 2.0);

    const double expected = iv.duration * session.nominal_sample_rate;
    const auto retained = static_cast<double>(end - begin);
    if (retained < min_retained_fraction * expected || onset_end == begin || end == begin) {
      result.dropped_intervals.push_back(k);
      continue;
    }

    IntervalWindow w;
    w.interval_index = k;
    w.level_index = iv.level_index;
    w.repetition_index = iv.repetition_index;
    w.illuminated_eye = iv.illuminated_eye;
    w.level_x = iv.level_x;
    w.begin = begin;
    w.end = end;
    w.right = extremes(session.smooth_right, begin, onset_end, end);
    w.left = extremes(session.smooth_left, begin, onset_end, end);
    // A blink can hide the true max or min. Suspect extremes sit right next
    // to removed rows, or the max trails the min because the onset was cut.
    const auto hidden = [&](const PupilExtremes& e) {
      const double t_max = ts[e.max_row];
      const double t_min = ts[e.min_row];
      return gap_within(t_max - guard_s, t_max + guard_s) ||
             gap_within(t_min - guard_s, t_min + guard_s) ||
             (e.max_row > e.min_row && gap_within(iv.start - guard_s, t_max));
    };
    if (hidden(w.right) || hidden(w.left)) {
      result.censored_intervals.push_back(k);
      continue;
    }
    result.windows.push_back(w);
  }
  return result;
}

std::vector<IntervalWindow> segment(const CleanSession& session, const Schedule& schedule,
                                    double min_retained_fraction) {
  SegmentResult r = segment_intervals(session, schedule, min_retained_fraction);
  if (!r.dropped_intervals.empty()) {
    const auto& iv = schedule.intervals[r.dropped_intervals.front()];
    fail(ErrorCode::IntervalDropout,
         fmt::format("interval {} (level {}, repetition {}, {} eye) kept fewer than {:.0f}% of "
                     "its samples after blink removal",
                     r.dropped_intervals.front(), iv.level_index, iv.repetition_index,
                     to_string(iv.illuminated_eye), 100.0 * min_retained_fraction));
  }
  return std::move(r.windows);
}

}  // namespace rapd
