#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rapd {

enum class ErrorCode {
  Domain,
  Range,
  Fit,
  Protocol,
  Parse,
  Io,
  UnresolvableScore,
  IntervalDropout,
  LevelDropout,
  InsufficientData,
  DegenerateFit,
  FlatResponse,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so the C API can map it
// to a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace rapd
