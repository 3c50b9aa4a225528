#pragma once

#include <span>
#include <vector>

#include "rapd/units.hpp"

namespace rapd {

/// One photometer reading: a grey-level drive value and the luminance it
/// produced on the headset display.
struct LuminanceSample {
  double drive = 0.0;
  double luminance = 0.0;  // cd/m^2
};

/// Logarithmic display model L(v) = offset_a + slope_b * ln(v).
///
/// reference_drive is the drive treated as zero optical density for the
/// headset; reference_luminance caches L(reference_drive).
struct CalibrationModel {
  double offset_a = 0.0;
  double slope_b = 0.0;
  double pearson_r = 0.0;
  double reference_drive = 1.0;
  double reference_luminance = 0.0;
};

/// Least-squares fit of luminance against ln(drive).
CalibrationModel fit_luminance_model(std::span<const LuminanceSample> samples,
                                     double reference_drive);

double luminance_at(const CalibrationModel& model, double drive);

/// Drive value whose predicted luminance is t * reference_luminance.
double drive_for_transmittance(const CalibrationModel& model, Transmittance t);

double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

}  // namespace rapd
