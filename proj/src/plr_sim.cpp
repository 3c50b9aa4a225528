#include "rapd/plr_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "rapd/error.hpp"

namespace rapd {

namespace {

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::InvalidArgument, fmt::format("pupil model: {}", what));
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const PupilModelParams& p) {
  require(finite_pos(p.d_min) && finite_pos(p.d_max) && p.d_max > p.d_min,
          "need d_max > d_min > 0");
  require(finite_pos(p.half_luminance), "half_luminance must be > 0");
  require(finite_pos(p.steepness), "steepness must be > 0");
  require(finite_pos(p.tau_constrict) && finite_pos(p.tau_dilate),
          "time constants must be > 0");
  require(p.tau_constrict <= p.tau_dilate, "tau_constrict must not exceed tau_dilate");
  require(finite_nonneg(p.latency), "latency must be >= 0");
  require(std::isfinite(p.anisocoria), "anisocoria must be finite");
  require(finite_nonneg(p.defect_left) && finite_nonneg(p.defect_right),
          "defects must be >= 0");
  require(finite_nonneg(p.noise_sd), "noise_sd must be >= 0");
  require(finite_nonneg(p.blink_rate), "blink_rate must be >= 0");
  require(finite_pos(p.blink_duration), "blink_duration must be > 0");
  require(finite_pos(p.sample_rate), "sample_rate must be > 0");
  require(finite_pos(p.tau_adapt) && finite_pos(p.tau_recover),
          "adaptation time constants must be > 0");
  require(p.adaptation_floor >= 0.0 && p.adaptation_floor <= 1.0,
          "adaptation_floor must lie in [0, 1]");
  require(p.d_min - std::abs(p.anisocoria) / 2.0 - 3.0 * p.noise_sd > 0.0,
          "d_min too small for the anisocoria and noise level (diameters could reach 0)");
}

double effective_drive(const PupilModelParams& p, double lum_right, double lum_left) {
  if (!(lum_right >= 0.0) || !(lum_left >= 0.0)) {
    fail(ErrorCode::Domain,
         fmt::format("luminance must be >= 0 (right {}, left {})", lum_right, lum_left));
  }
  return std::pow(10.0, -p.defect_right) * lum_right +
         std::pow(10.0, -p.defect_left) * lum_left;
}

double steady_state_diameter(const PupilModelParams& p, double drive) {
  if (!(drive >= 0.0)) {
    fail(ErrorCode::Domain, fmt::format("drive must be >= 0, got {}", drive));
  }
  const double u = std::pow(drive / p.half_luminance, p.steepness);
  return p.d_min + (p.d_max - p.d_min) / (1.0 + u);
}

Session simulate_session(const PupilModelParams& p, const Schedule& schedule,
                         double reference_luminance) {
  validate(p);
  if (!(reference_luminance > 0.0) || !std::isfinite(reference_luminance)) {
    fail(ErrorCode::InvalidArgument,
         fmt::format("reference luminance must be > 0, got {}", reference_luminance));
  }

  const double dt = 1.0 / p.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(schedule.total_duration * p.sample_rate));
  const auto lag = static_cast<std::size_t>(std::llround(p.latency * p.sample_rate));

  // Exact discretisation of first-order relaxations over one sample step.
  const double keep_constrict = std::exp(-dt / p.tau_constrict);
  const double keep_dilate = std::exp(-dt / p.tau_dilate);
  const double keep_adapt = std::exp(-dt / p.tau_adapt);
  const double keep_recover = std::exp(-dt / p.tau_recover);

  // Independent streams: a blink-free twin with the same seed sees the same noise.
  std::seed_seq noise_seed{p.rng_seed, std::uint64_t{0x6e6f697365}};
  std::seed_seq blink_seed{p.rng_seed, std::uint64_t{0x626c696e6b}};
  std::mt19937_64 noise_rng(noise_seed);
  std::mt19937_64 blink_rng(blink_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> drive(n, 0.0);
  Session out;
  out.reserve(n);

  double diameter = p.d_max;
  double gain_right = 1.0;
  double gain_left = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / p.sample_rate;
    const EyeIllumination light = illumination_at(schedule, t);
    drive[k] = effective_drive(p, light.right * reference_luminance * gain_right,
                               light.left * reference_luminance * gain_left);

    const double half_aniso = p.anisocoria / 2.0;
    double dr = diameter + half_aniso;
    double dl = diameter - half_aniso;
    if (p.noise_sd > 0.0) {
      // Truncated at 3 sd so diameters stay inside the documented envelope.
      dr += p.noise_sd * std::clamp(gauss(noise_rng), -3.0, 3.0);
      dl += p.noise_sd * std::clamp(gauss(noise_rng), -3.0, 3.0);
    }
    out.push_back(t, light.right, light.left, dr, dl);

    const auto relax = [](double value, double target, double keep) {
      return target + (value - target) * keep;
    };
    gain_right = light.right > 0.0 ? relax(gain_right, p.adaptation_floor, keep_adapt)
                                   : relax(gain_right, 1.0, keep_recover);
    gain_left = light.left > 0.0 ? relax(gain_left, p.adaptation_floor, keep_adapt)
                                 : relax(gain_left, 1.0, keep_recover);

    const double delayed = k >= lag ? drive[k - lag] : 0.0;
    const double target = steady_state_diameter(p, delayed);
    diameter = relax(diameter, target, target < diameter ? keep_constrict : keep_dilate);
  }

  if (p.blink_rate > 0.0) {
    std::exponential_distribution<double> gap(p.blink_rate);
    double onset = gap(blink_rng);
    while (onset < schedule.total_duration) {
      const auto first = static_cast<std::size_t>(std::ceil(onset * p.sample_rate));
      const auto last = static_cast<std::size_t>(
          std::ceil((onset + p.blink_duration) * p.sample_rate));
      for (std::size_t k = first; k < std::min(last, n); ++k) {
        out.pupil_right[k] = kBlinkSentinel;
        out.pupil_left[k] = kBlinkSentinel;
      }
      onset += p.blink_duration + gap(blink_rng);
    }
  }
  return out;
}

}  // namespace rapd
