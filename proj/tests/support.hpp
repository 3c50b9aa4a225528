// Shared helpers for the unit tests.
#pragma once

#include <string>

#include <doctest.h>

#include "rapd/error.hpp"
#include "rapd/plr_sim.hpp"
#include "rapd/protocol.hpp"
#include "rapd/scoring.hpp"

namespace testing {

// Error code raised by fn, failing the test when nothing is thrown.
template <class F>
rapd::ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const rapd::Error& e) {
    return e.code();
  }
  FAIL("expected rapd::Error");
  return rapd::ErrorCode::InvalidArgument;
}

inline constexpr double kVive = 97.8;

// Simulate a protocol run with a defect on one eye (d > 0 left, d < 0 right)
// and return the final score.
inline double roundtrip(int protocol, double signed_defect, double noise_sd = 0.0,
                        double blink_rate = 0.0, std::uint64_t seed = 0) {
  rapd::PupilModelParams p;
  if (signed_defect > 0) p.defect_left = signed_defect;
  if (signed_defect < 0) p.defect_right = -signed_defect;
  p.noise_sd = noise_sd;
  p.blink_rate = blink_rate;
  p.rng_seed = seed;
  const auto schedule = rapd::build_protocol(rapd::protocol_pause(protocol));
  return rapd::score_session(rapd::simulate_session(p, schedule, kVive), schedule)
      .final_score.value;
}

}  // namespace testing
