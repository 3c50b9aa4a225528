#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rapd/calibration.hpp"
#include "rapd/session.hpp"

namespace rapd {

inline constexpr std::string_view kSessionHeader =
    "timestamp,illum_right,illum_left,pupil_right,pupil_left";
inline constexpr std::string_view kCalibrationHeader = "drive,luminance";

/// Split on commas; fields are trimmed of surrounding blanks.
std::vector<std::string> split_csv_line(std::string_view line);

/// Parse a session CSV. Errors carry the 1-based line number.
Session parse_session(std::istream& in, const std::string& source = "<stream>");
Session read_session(const std::string& path);

/// Timestamps with 6 decimals, illumination with 6, diameters with 4.
void format_session(const Session& session, std::ostream& out);
void write_session(const Session& session, const std::string& path);

std::vector<LuminanceSample> read_calibration_samples(const std::string& path);

/// Write `content` to `path`, raising ErrorCode::Io on failure.
void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace rapd
