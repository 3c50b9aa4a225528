#include "rapd/plot.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include <fmt/format.h>

#include "rapd/error.hpp"
#include "rapd/session_io.hpp"
#include "rapd/signal.hpp"

namespace rapd {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

// Linear map from data range to a pixel range.
struct Axis {
  double lo;
  double hi;
  double px_lo;
  double px_hi;
  double operator()(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

class Svg {
 public:
  Svg() {
    out("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight, kWidth, kHeight);
    out("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth,
        kHeight);
  }

  template <class... Args>
  void out(fmt::format_string<Args...> f, Args&&... args) {
    fmt::format_to(std::back_inserter(buf_), f, std::forward<Args>(args)...);
  }

  void text(double x, double y, std::string_view s, const char* anchor = "middle",
            const char* extra = "") {
    out("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"{}\"{}>{}</text>\n", x, y, anchor, extra,
        s);
  }

  void line(double x1, double y1, double x2, double y2, const char* style) {
    out("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" {}/>\n", x1, y1, x2, y2,
        style);
  }

  // Frame, ticks and axis titles.
  void axes(const Axis& x, const Axis& y, double x_step, double y_step, std::string_view x_label,
            std::string_view y_label, std::string_view title) {
    out("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
        "stroke=\"black\"/>\n",
        kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
    for (double v = std::ceil(x.lo / x_step) * x_step; v <= x.hi + 1e-9; v += x_step) {
      const double px = x(v);
      line(px, y.px_lo, px, y.px_lo + 5, "stroke=\"black\"");
      text(px, y.px_lo + 18, fmt::format("{:g}", std::abs(v) < 1e-12 ? 0.0 : v));
    }
    for (double v = std::ceil(y.lo / y_step) * y_step; v <= y.hi + 1e-9; v += y_step) {
      const double py = y(v);
      line(x.px_lo - 5, py, x.px_lo, py, "stroke=\"black\"");
      text(x.px_lo - 8, py + 4, fmt::format("{:g}", std::abs(v) < 1e-12 ? 0.0 : v), "end");
    }
    text((x.px_lo + x.px_hi) / 2, kHeight - 15, x_label);
    text(18, (y.px_lo + y.px_hi) / 2, y_label, "middle",
         fmt::format(" transform=\"rotate(-90 18 {:.2f})\"", (y.px_lo + y.px_hi) / 2).c_str());
    text(kWidth / 2, 22, title, "middle", " font-size=\"14\"");
  }

  std::string finish() {
    out("</svg>\n");
    return fmt::to_string(buf_);
  }

 private:
  fmt::memory_buffer buf_;
};

double nice_step(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string regression_svg(const RapdReport& report) {
  if (report.level_scores.size() < 2 || !std::isfinite(report.slope) ||
      !std::isfinite(report.y_intercept) || std::abs(report.slope) < kSlopeFloor) {
    fail(ErrorCode::InvalidArgument, "report has no regression fit to plot");
  }
  const double intercept = report.final_score.value;
  double x_lo = -0.7;
  double x_hi = 0.7;
  double y_lo = 0.0;
  double y_hi = 0.0;
  for (const auto& l : report.level_scores) {
    x_lo = std::min(x_lo, l.level_x.value);
    x_hi = std::max(x_hi, l.level_x.value);
    y_lo = std::min(y_lo, l.score.value);
    y_hi = std::max(y_hi, l.score.value);
  }
  if (std::isfinite(intercept)) {
    x_lo = std::min(x_lo, intercept - 0.1);
    x_hi = std::max(x_hi, intercept + 0.1);
  }
  for (double x : {x_lo, x_hi}) {
    const double y = report.slope * x + report.y_intercept;
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }
  const double pad = std::max(0.5, 0.08 * (y_hi - y_lo));
  y_lo -= pad;
  y_hi += pad;

  const Axis x{x_lo, x_hi, kLeft, kWidth - kRight};
  const Axis y{y_lo, y_hi, kHeight - kBottom, kTop};
  Svg svg;
  svg.axes(x, y, nice_step(x_hi - x_lo, 8), nice_step(y_hi - y_lo, 8),
           "Illumination difference, OD left - OD right (log units)", "RAPD score (log units)",
           "RAPD score calculation");
  svg.line(x.px_lo, y(0.0), x.px_hi, y(0.0), "stroke=\"#999\" stroke-dasharray=\"4 3\"");
  svg.line(x(x_lo), y(report.slope * x_lo + report.y_intercept), x(x_hi),
           y(report.slope * x_hi + report.y_intercept),
           "class=\"fit\" stroke=\"#1f77b4\" stroke-width=\"2\"");
  for (const auto& l : report.level_scores) {
    svg.out("<circle class=\"level\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"#d62728\"/>\n",
            x(l.level_x.value), y(l.score.value));
  }
  svg.out("<circle class=\"intercept\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"6\" fill=\"none\" "
          "stroke=\"black\" stroke-width=\"2\"/>\n",
          x(intercept), y(0.0));
  svg.text(x(intercept), y(0.0) - 12, fmt::format("{:.2f}", intercept), "middle",
           " class=\"intercept-label\" font-weight=\"bold\"");
  svg.text(kWidth - kRight - 8, kTop + 18,
           fmt::format("final score {:.2f} log units ({})", intercept,
                       to_string(report.classification)),
           "end");
  return svg.finish();
}

std::string trace_svg(const Session& session, const Schedule& schedule,
                      const PipelineParams& params) {
  const CleanSession clean = clean_session(session, params.signal);
  const SegmentResult seg =
      segment_intervals(clean, schedule, params.signal.min_retained_fraction);
  const auto& ts = clean.session.timestamp;

  double d_lo = clean.smooth_right.front();
  double d_hi = d_lo;
  for (const auto* series : {&clean.smooth_right, &clean.smooth_left}) {
    const auto [lo, hi] = std::minmax_element(series->begin(), series->end());
    d_lo = std::min(d_lo, *lo);
    d_hi = std::max(d_hi, *hi);
  }
  const double pad = std::max(0.2, 0.05 * (d_hi - d_lo));
  d_lo = std::max(0.0, d_lo - pad);
  d_hi += pad;
  const double t_hi = std::max(schedule.total_duration, ts.back());

  const Axis x{0.0, t_hi, kLeft, kWidth - kRight};
  const Axis y{d_lo, d_hi, kHeight - kBottom, kTop};
  Svg svg;
  svg.axes(x, y, nice_step(t_hi, 10), nice_step(d_hi - d_lo, 6), "Timestamp (s)",
           "Pupil diameter (mm)", "Timestamp vs pupil diameter");

  // Lit-eye band: right eye on the upper strip, left on the lower.
  for (const auto& iv : schedule.intervals) {
    const double band_y = iv.illuminated_eye == Eye::Right ? kTop + 2 : kTop + 9;
    svg.out("<rect class=\"illumination\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" "
            "height=\"6\" fill=\"{}\" fill-opacity=\"{:.3f}\"/>\n",
            x(iv.start), band_y, x(iv.end()) - x(iv.start),
            iv.illuminated_eye == Eye::Right ? "#d62728" : "#1f77b4", iv.transmittance.value);
  }

  const auto polyline = [&](const std::vector<double>& d, const char* cls, const char* color) {
    svg.out("<polyline class=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"", cls,
            color);
    for (std::size_t i = 0; i < d.size(); ++i) {
      svg.out("{}{:.2f},{:.2f}", i == 0 ? "" : " ", x(ts[i]), y(d[i]));
    }
    svg.out("\"/>\n");
  };
  polyline(clean.smooth_right, "pupil-right", "#d62728");
  polyline(clean.smooth_left, "pupil-left", "#1f77b4");

  for (const auto& w : seg.windows) {
    const auto& series = w.illuminated_eye == Eye::Right ? clean.smooth_right : clean.smooth_left;
    const PupilExtremes& e = w.pupil(w.illuminated_eye);
    for (std::size_t row : {e.max_row, e.min_row}) {
      svg.out("<circle class=\"extremum\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"black\"/>\n",
              x(ts[row]), y(series[row]));
    }
  }
  svg.text(kWidth - kRight - 8, kHeight - kBottom - 10, "red: right pupil, blue: left pupil",
           "end");
  return svg.finish();
}

std::string emit_plot(const PlotSpec& spec) {
  std::string doc;
  if (spec.kind == PlotKind::Regression) {
    if (!spec.report) fail(ErrorCode::InvalidArgument, "regression plot needs a report");
    doc = regression_svg(*spec.report);
  } else {
    if (!spec.session || !spec.schedule) {
      fail(ErrorCode::InvalidArgument, "trace plot needs a session and a schedule");
    }
    doc = trace_svg(*spec.session, *spec.schedule, spec.params);
  }
  if (!spec.output_path.empty()) write_text_file(spec.output_path, doc);
  return doc;
}

}  // namespace rapd
