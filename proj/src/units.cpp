#include "rapd/units.hpp"

#include <cmath>

#include <fmt/format.h>

#include "rapd/error.hpp"

namespace rapd {

Transmittance od_to_transmittance(OpticalDensity od) {
  if (!std::isfinite(od.value) || od.value < 0.0) {
    fail(ErrorCode::Domain,
         fmt::format("optical density must be finite and >= 0, got {}", od.value));
  }
  return Transmittance{std::pow(10.0, -od.value)};
}

OpticalDensity transmittance_to_od(Transmittance t) {
  if (!(t.value > 0.0 && t.value <= 1.0)) {
    fail(ErrorCode::Domain,
         fmt::format("transmittance must lie in (0, 1], got {}", t.value));
  }
  // -log10(1) is -0.0; keep the identity case a clean zero.
  return OpticalDensity{t.value == 1.0 ? 0.0 : -std::log10(t.value)};
}

double percent_change_ca(double max_diameter_mm, double min_diameter_mm) {
  if (!std::isfinite(max_diameter_mm) || !std::isfinite(min_diameter_mm) ||
      min_diameter_mm <= 0.0 || max_diameter_mm <= 0.0) {
    fail(ErrorCode::Domain,
         fmt::format("diameters must be positive (max {}, min {})", max_diameter_mm,
                     min_diameter_mm));
  }
  if (min_diameter_mm > max_diameter_mm) {
    fail(ErrorCode::Domain, fmt::format("min diameter {} exceeds max diameter {}",
                                        min_diameter_mm, max_diameter_mm));
  }
  return (max_diameter_mm - min_diameter_mm) / max_diameter_mm;
}

LogUnits rapd_score_from_ca(double ca_right_illum, double ca_left_illum) {
  if (std::isnan(ca_right_illum) || std::isnan(ca_left_illum) || ca_right_illum >= 1.0 ||
      ca_left_illum >= 1.0) {
    fail(ErrorCode::Domain, fmt::format("constriction amplitudes must lie in [0, 1) "
                                        "(right {}, left {})",
                                        ca_right_illum, ca_left_illum));
  }
  if (ca_right_illum <= 0.0 || ca_left_illum <= 0.0) {
    fail(ErrorCode::UnresolvableScore,
         fmt::format("no measurable constriction (right {}, left {})", ca_right_illum,
                     ca_left_illum));
  }
  return LogUnits{10.0 * std::log10(ca_right_illum / ca_left_illum)};
}

}  // namespace rapd
