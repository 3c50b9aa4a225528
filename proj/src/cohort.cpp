#include "rapd/cohort.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>
#include <variant>

#include <fmt/format.h>

#include "rapd/error.hpp"
#include "rapd/session_io.hpp"

namespace rapd {

CohortMetrics evaluate_cohort(std::span<const LabeledOutcome> outcomes) {
  if (outcomes.empty()) {
    fail(ErrorCode::InsufficientData, "cohort is empty");
  }
  CohortMetrics m;
  std::size_t eye_labelled = 0;
  std::size_t eye_matched = 0;
  for (const LabeledOutcome& o : outcomes) {
    const bool predicted_positive = o.predicted != Classification::Negative;
    if (o.true_label == TrueLabel::Positive) {
      predicted_positive ? ++m.tp : ++m.fn;
      if (predicted_positive && o.affected_eye) {
        ++eye_labelled;
        const Eye predicted_eye =
            o.predicted == Classification::PositiveLeft ? Eye::Left : Eye::Right;
        if (predicted_eye == *o.affected_eye) ++eye_matched;
      }
    } else {
      predicted_positive ? ++m.fp : ++m.tn;
    }
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.size());
  if (m.tp + m.fn > 0) {
    m.sensitivity = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  }
  if (m.tn + m.fp > 0) {
    m.specificity = static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
  }
  if (eye_labelled > 0) {
    m.eye_agreement = static_cast<double>(eye_matched) / static_cast<double>(eye_labelled);
  }
  return m;
}

void parse_label(const std::string& text, TrueLabel& label, std::optional<Eye>& eye) {
  eye.reset();
  if (text == "negative") {
    label = TrueLabel::Negative;
  } else if (text == "positive") {
    label = TrueLabel::Positive;
  } else if (text == "positive_left") {
    label = TrueLabel::Positive;
    eye = Eye::Left;
  } else if (text == "positive_right") {
    label = TrueLabel::Positive;
    eye = Eye::Right;
  } else {
    fail(ErrorCode::Parse, fmt::format("unknown label '{}'", text));
  }
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open manifest '{}'", path));
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "subject,session_path,label") {
        fail(ErrorCode::Parse, fmt::format("{}:1: expected header "
                                           "'subject,session_path,label', got '{}'",
                                           path, line));
      }
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 3) {
      fail(ErrorCode::Parse,
           fmt::format("{}:{}: expected 3 fields, got {}", path, line_no, fields.size()));
    }
    ManifestEntry e;
    e.subject = fields[0];
    std::filesystem::path session(fields[1]);
    e.session_path = session.is_absolute() ? session.string() : (base / session).string();
    try {
      parse_label(fields[2], e.label, e.affected_eye);
    } catch (const Error& err) {
      fail(ErrorCode::Parse, fmt::format("{}:{}: {}", path, line_no, err.what()));
    }
    entries.push_back(std::move(e));
  }
  if (line_no == 0) fail(ErrorCode::Parse, fmt::format("{}: empty manifest", path));
  return entries;
}

CohortRun run_cohort(std::span<const ManifestEntry> manifest, const Schedule& schedule,
                     const PipelineParams& params, unsigned threads) {
  using Result = std::variant<LabeledOutcome, CohortFailure>;
  std::vector<Result> results(manifest.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < manifest.size(); i = next++) {
      const ManifestEntry& e = manifest[i];
      try {
        const RapdReport r = score_session(read_session(e.session_path), schedule, params);
        results[i] = LabeledOutcome{e.subject, e.label, e.affected_eye, r.classification,
                                    r.final_score.value};
      } catch (const Error& err) {
        results[i] = CohortFailure{e.subject, err.what()};
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, manifest.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  CohortRun run;
  for (Result& r : results) {
    if (auto* o = std::get_if<LabeledOutcome>(&r)) {
      run.outcomes.push_back(std::move(*o));
    } else {
      run.failures.push_back(std::move(std::get<CohortFailure>(r)));
    }
  }
  if (!run.outcomes.empty()) run.metrics = evaluate_cohort(run.outcomes);
  return run;
}

}  // namespace rapd
