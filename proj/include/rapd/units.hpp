#pragma once

// Photometric and pupillometric unit conversions.
//
// Diameters are millimetres, times are seconds and luminance is cd/m^2
// throughout the library.

namespace rapd {

/// Attenuation in log10 units; OD = -log10(T).
struct OpticalDensity {
  double value = 0.0;
};

/// Fraction of incident light passed, in (0, 1].
struct Transmittance {
  double value = 1.0;
};

/// Signed log10 quantity: illumination differences and RAPD scores.
struct LogUnits {
  double value = 0.0;
};

Transmittance od_to_transmittance(OpticalDensity od);
OpticalDensity transmittance_to_od(Transmittance t);

/// Constriction amplitude (max - min) / max of one pupil in one interval.
double percent_change_ca(double max_diameter_mm, double min_diameter_mm);

/// Per-level score: 10 log10(ca_right_illum / ca_left_illum).
///
/// A non-positive amplitude means the interval produced no measurable
/// constriction; that is reported as ErrorCode::UnresolvableScore so callers
/// can drop the level instead of aborting.
LogUnits rapd_score_from_ca(double ca_right_illum, double ca_left_illum);

}  // namespace rapd
