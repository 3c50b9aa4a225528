#include "rapd/session_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "rapd/error.hpp"

namespace rapd {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_number(std::string_view field, const std::string& source, std::size_t line,
                    const char* column) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    fail(ErrorCode::Parse, fmt::format("{}:{}: cannot parse {} value '{}'", source, line,
                                       column, field));
  }
  return value;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    fields.emplace_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

Session parse_session(std::istream& in, const std::string& source) {
  static constexpr const char* kColumns[] = {"timestamp", "illum_right", "illum_left",
                                             "pupil_right", "pupil_left"};
  Session s;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (!header_seen) {
      if (text != kSessionHeader) {
        fail(ErrorCode::Parse,
             fmt::format("{}:{}: expected header '{}'", source, line_no, kSessionHeader));
      }
      header_seen = true;
      continue;
    }
    if (text.empty()) continue;
    const auto fields = split_csv_line(text);
    if (fields.size() != 5) {
      fail(ErrorCode::Parse, fmt::format("{}:{}: expected 5 fields, got {}", source, line_no,
                                         fields.size()));
    }
    double v[5];
    for (int c = 0; c < 5; ++c) v[c] = parse_number(fields[c], source, line_no, kColumns[c]);
    for (int c : {1, 2}) {
      if (v[c] < 0.0 || v[c] > 1.0) {
        fail(ErrorCode::Parse, fmt::format("{}:{}: {} {} outside [0, 1]", source, line_no,
                                           kColumns[c], v[c]));
      }
    }
    if (!s.empty() && !(v[0] > s.timestamp.back())) {
      fail(ErrorCode::Parse,
           fmt::format("{}:{}: timestamp {} does not increase", source, line_no, v[0]));
    }
    s.push_back(v[0], v[1], v[2], v[3], v[4]);
  }
  if (!header_seen) {
    fail(ErrorCode::Parse, fmt::format("{}: empty file, missing header", source));
  }
  return s;
}

Session read_session(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open session '{}'", path));
  return parse_session(in, path);
}

void format_session(const Session& session, std::ostream& out) {
  validate(session);
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kSessionHeader);
  for (std::size_t i = 0; i < session.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{:.6f},{:.6f},{:.6f},{:.4f},{:.4f}\n",
                   session.timestamp[i], session.illum_right[i], session.illum_left[i],
                   session.pupil_right[i], session.pupil_left[i]);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_session(const Session& session, const std::string& path) {
  std::ostringstream os;
  format_session(session, os);
  write_text_file(path, os.str());
}

std::vector<LuminanceSample> read_calibration_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open calibration file '{}'", path));
  std::vector<LuminanceSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (line_no == 1) {
      if (text != kCalibrationHeader) {
        fail(ErrorCode::Parse,
             fmt::format("{}:1: expected header '{}'", path, kCalibrationHeader));
      }
      continue;
    }
    if (text.empty()) continue;
    const auto fields = split_csv_line(text);
    if (fields.size() != 2) {
      fail(ErrorCode::Parse,
           fmt::format("{}:{}: expected 2 fields, got {}", path, line_no, fields.size()));
    }
    samples.push_back({parse_number(fields[0], path, line_no, "drive"),
                       parse_number(fields[1], path, line_no, "luminance")});
  }
  if (line_no == 0) fail(ErrorCode::Parse, fmt::format("{}: empty file", path));
  return samples;
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, fmt::format("cannot open '{}' for writing", path));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) fail(ErrorCode::Io, fmt::format("write to '{}' failed", path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open '{}'", path));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace rapd
