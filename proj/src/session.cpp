#include "rapd/session.hpp"

#include <utility>

#include <fmt/format.h>

#include "rapd/error.hpp"

namespace rapd {

void Session::reserve(std::size_t n) {
  timestamp.reserve(n);
  illum_right.reserve(n);
  illum_left.reserve(n);
  pupil_right.reserve(n);
  pupil_left.reserve(n);
}

void Session::push_back(double t, double ir, double il, double dr, double dl) {
  timestamp.push_back(t);
  illum_right.push_back(ir);
  illum_left.push_back(il);
  pupil_right.push_back(dr);
  pupil_left.push_back(dl);
}

Session mirror_session(const Session& s) {
  Session m = s;
  std::swap(m.illum_right, m.illum_left);
  std::swap(m.pupil_right, m.pupil_left);
  return m;
}

void validate(const Session& s) {
  const std::size_t n = s.timestamp.size();
  if (s.illum_right.size() != n || s.illum_left.size() != n || s.pupil_right.size() != n ||
      s.pupil_left.size() != n) {
    fail(ErrorCode::InvalidArgument, "session columns have different lengths");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(s.timestamp[i] > s.timestamp[i - 1])) {
      fail(ErrorCode::InvalidArgument,
           fmt::format("session timestamps not increasing at row {}", i));
    }
  }
}

}  // namespace rapd
