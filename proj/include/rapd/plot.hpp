#pragma once

#include <string>

#include "rapd/protocol.hpp"
#include "rapd/scoring.hpp"
#include "rapd/session.hpp"

namespace rapd {

enum class PlotKind { Trace, Regression };

/// What to draw. Trace plots need session + schedule (+ pipeline params for
/// cleaning); regression plots need a report.
struct PlotSpec {
  PlotKind kind = PlotKind::Regression;
  const Session* session = nullptr;
  const Schedule* schedule = nullptr;
  const RapdReport* report = nullptr;
  PipelineParams params;
  std::string output_path;  // written when non-empty
};

/// Level scores against illumination difference with the fitted line and its
/// x-intercept (labelled to 2 decimals).
std::string regression_svg(const RapdReport& report);

/// Smoothed pupil diameters against time, lit-eye bands along the top and a
/// black dot at the illuminated pupil's max and min in every interval.
std::string trace_svg(const Session& session, const Schedule& schedule,
                      const PipelineParams& params = {});

/// Render per spec; writes spec.output_path if set and returns the document.
std::string emit_plot(const PlotSpec& spec);

}  // namespace rapd
