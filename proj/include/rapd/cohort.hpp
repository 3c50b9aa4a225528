#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rapd/protocol.hpp"
#include "rapd/scoring.hpp"

namespace rapd {

enum class TrueLabel { Positive, Negative };

struct LabeledOutcome {
  std::string subject;
  TrueLabel true_label = TrueLabel::Negative;
  std::optional<Eye> affected_eye;  // when the label names the eye
  Classification predicted = Classification::Negative;
  double final_score = 0.0;
};

struct CohortMetrics {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  double accuracy = 0.0;
  std::optional<double> sensitivity;  // absent without positive labels
  std::optional<double> specificity;  // absent without negative labels
  // Among true positives whose label names an eye: fraction attributed to it.
  std::optional<double> eye_agreement;

  std::size_t size() const noexcept { return tp + fn + tn + fp; }
};

CohortMetrics evaluate_cohort(std::span<const LabeledOutcome> outcomes);

struct ManifestEntry {
  std::string subject;
  std::string session_path;
  TrueLabel label = TrueLabel::Negative;
  std::optional<Eye> affected_eye;
};

/// Labels: negative | positive | positive_left | positive_right.
void parse_label(const std::string& text, TrueLabel& label, std::optional<Eye>& eye);

/// Manifest CSV with header `subject,session_path,label`. Relative session
/// paths resolve against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::string& path);

struct CohortFailure {
  std::string subject;
  std::string message;
};

struct CohortRun {
  std::vector<LabeledOutcome> outcomes;  // manifest order
  std::vector<CohortFailure> failures;   // sessions that could not be scored
  CohortMetrics metrics;
};

/// Score every manifest entry (up to `threads` at once) and reduce the
/// outcomes. Sessions that fail to load or score are reported, not counted.
CohortRun run_cohort(std::span<const ManifestEntry> manifest, const Schedule& schedule,
                     const PipelineParams& params, unsigned threads = 0);

}  // namespace rapd
