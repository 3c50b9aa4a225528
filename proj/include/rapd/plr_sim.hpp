#pragma once

#include <cstdint>

#include "rapd/protocol.hpp"
#include "rapd/session.hpp"

namespace rapd {

/// Parameters of the synthetic pupil light reflex.
///
/// Each eye's afferent input is its luminance attenuated by 10^-defect and by
/// a retinal light-adaptation gain. The gain falls toward adaptation_floor
/// while the eye is lit (tau_adapt) and recovers toward 1 in the dark
/// (tau_recover), so every switch of the light produces a fresh onset
/// response followed by pupillary escape. Both pupils share the summed
/// (consensual) drive.
struct PupilModelParams {
  double d_max = 7.0;             // mm, dark-adapted diameter
  double d_min = 2.0;             // mm, fully constricted diameter
  double half_luminance = 100.0;  // cd/m^2 giving the half-range response
  double steepness = 0.4;
  double tau_constrict = 0.45;  // s
  double tau_dilate = 0.45;     // s
  double latency = 0.25;        // s
  double anisocoria = 0.0;      // mm, right minus left
  double defect_left = 0.0;     // log units
  double defect_right = 0.0;    // log units
  double noise_sd = 0.0;        // mm
  double blink_rate = 0.0;      // events per second
  double blink_duration = 0.2;  // s
  double sample_rate = 120.0;   // Hz
  double tau_adapt = 0.08;      // s
  double tau_recover = 0.4;     // s
  double adaptation_floor = 0.0;
  std::uint64_t rng_seed = 0;
};

/// Throws ErrorCode::InvalidArgument describing the first violated constraint.
void validate(const PupilModelParams& p);

/// Consensual drive 10^-defect_right * lum_right + 10^-defect_left * lum_left.
double effective_drive(const PupilModelParams& p, double lum_right, double lum_left);

/// Static light response: d_min + (d_max - d_min) / (1 + (drive/half)^steepness).
double steady_state_diameter(const PupilModelParams& p, double drive);

/// Simulate a recording of `schedule`, sampled at p.sample_rate from t = 0 up
/// to (excluding) the end of the run. Lit eyes receive
/// transmittance * reference_luminance cd/m^2.
Session simulate_session(const PupilModelParams& p, const Schedule& schedule,
                         double reference_luminance);

}  // namespace rapd
