#include "rapd/calibration.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rapd/error.hpp"

namespace rapd {
namespace {

struct Moments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

// Two-pass centred sums; the single-pass form loses digits on the
// near-collinear data a good calibration produces.
Moments centred_moments(std::span<const double> xs, std::span<const double> ys) {
  Moments m;
  const auto n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m.mean_x += xs[i];
    m.mean_y += ys[i];
  }
  m.mean_x /= n;
  m.mean_y /= n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - m.mean_x;
    const double dy = ys[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

}  // namespace

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    fail(ErrorCode::InvalidArgument,
         fmt::format("pearson: length mismatch ({} vs {})", xs.size(), ys.size()));
  }
  if (xs.size() < 2) {
    fail(ErrorCode::InvalidArgument, "pearson: need at least two points");
  }
  const Moments m = centred_moments(xs, ys);
  if (m.sxx <= 0.0 || m.syy <= 0.0) {
    fail(ErrorCode::Domain, "pearson: correlation undefined for zero-variance input");
  }
  const double r = m.sxy / std::sqrt(m.sxx * m.syy);
  return std::clamp(r, -1.0, 1.0);
}

CalibrationModel fit_luminance_model(std::span<const LuminanceSample> samples,
                                     double reference_drive) {
  if (samples.size() < 3) {
    fail(ErrorCode::Fit,
         fmt::format("calibration needs at least 3 samples, got {}", samples.size()));
  }
  if (!(reference_drive > 0.0) || !std::isfinite(reference_drive)) {
    fail(ErrorCode::Fit, fmt::format("reference drive must be > 0, got {}", reference_drive));
  }
  std::vector<double> log_drive;
  std::vector<double> luminance;
  log_drive.reserve(samples.size());
  luminance.reserve(samples.size());
  for (const auto& s : samples) {
    if (!(s.drive > 0.0) || !(s.luminance > 0.0) || !std::isfinite(s.drive) ||
        !std::isfinite(s.luminance)) {
      fail(ErrorCode::Fit, fmt::format("calibration sample ({}, {}) is not positive",
                                       s.drive, s.luminance));
    }
    log_drive.push_back(std::log(s.drive));
    luminance.push_back(s.luminance);
  }

  const Moments m = centred_moments(log_drive, luminance);
  if (m.sxx <= 0.0) {
    fail(ErrorCode::Fit, "calibration drives are all identical");
  }
  CalibrationModel model;
  model.slope_b = m.sxy / m.sxx;
  model.offset_a = m.mean_y - model.slope_b * m.mean_x;
  if (!(model.slope_b > 0.0)) {
    fail(ErrorCode::Fit,
         fmt::format("fitted luminance model is not increasing (slope {})", model.slope_b));
  }
  model.pearson_r =
      m.syy > 0.0 ? std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0) : 0.0;
  model.reference_drive = reference_drive;
  model.reference_luminance = luminance_at(model, reference_drive);
  return model;
}

double luminance_at(const CalibrationModel& model, double drive) {
  if (!(drive > 0.0) || !std::isfinite(drive)) {
    fail(ErrorCode::Domain, fmt::format("drive must be > 0, got {}", drive));
  }
  return model.offset_a + model.slope_b * std::log(drive);
}

double drive_for_transmittance(const CalibrationModel& model, Transmittance t) {
  if (!(t.value > 0.0 && t.value <= 1.0)) {
    fail(ErrorCode::Domain, fmt::format("transmittance must lie in (0, 1], got {}", t.value));
  }
  if (!(model.slope_b > 0.0)) {
    fail(ErrorCode::Range, "calibration model is not increasing");
  }
  if (t.value == 1.0) {
    return model.reference_drive;
  }
  const double target = t.value * model.reference_luminance;
  if (!(target > 0.0)) {
    fail(ErrorCode::Range,
         fmt::format("target luminance {} is outside the model's valid range", target));
  }
  const double drive = std::exp((target - model.offset_a) / model.slope_b);
  if (!(drive > 0.0) || !std::isfinite(drive)) {
    fail(ErrorCode::Range,
         fmt::format("no positive drive realises {} cd/m^2 under this model", target));
  }
  return drive;
}

}  // namespace rapd
