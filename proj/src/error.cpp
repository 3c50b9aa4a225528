#include "rapd/error.hpp"

namespace rapd {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::Range: return "range error";
    case ErrorCode::Fit: return "fit error";
    case ErrorCode::Protocol: return "protocol error";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::UnresolvableScore: return "unresolvable score";
    case ErrorCode::IntervalDropout: return "interval dropout";
    case ErrorCode::LevelDropout: return "level dropout";
    case ErrorCode::InsufficientData: return "insufficient data";
    case ErrorCode::DegenerateFit: return "degenerate fit";
    case ErrorCode::FlatResponse: return "flat response";
    case ErrorCode::InvalidArgument: return "invalid argument";
  }
  return "unknown error";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rapd
