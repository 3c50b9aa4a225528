#pragma once

#include <cstddef>
#include <vector>

namespace rapd {

/// Diameter value written for rows where the tracker lost the pupil (blinks).
constexpr double kBlinkSentinel = 0.0;

/// Five-column recording: timestamp, per-eye illumination (transmittance of
/// the lit eye, 0 when dark) and per-eye pupil diameter in mm.
///
/// Stored column-wise because every analysis stage works on whole columns.
struct Session {
  std::vector<double> timestamp;
  std::vector<double> illum_right;
  std::vector<double> illum_left;
  std::vector<double> pupil_right;
  std::vector<double> pupil_left;

  std::size_t size() const noexcept { return timestamp.size(); }
  bool empty() const noexcept { return timestamp.empty(); }
  void reserve(std::size_t n);
  void push_back(double t, double ir, double il, double dr, double dl);
};

/// Swap the left and right columns.
Session mirror_session(const Session& s);

/// Throws ErrorCode::InvalidArgument when column lengths differ or
/// timestamps are not strictly increasing.
void validate(const Session& s);

}  // namespace rapd
