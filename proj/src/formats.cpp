#include "rapd/formats.hpp"

#include <fmt/format.h>

#include "rapd/error.hpp"
#include "rapd/session_io.hpp"

namespace rapd {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorCode::Parse, fmt::format("missing field '{}'", key));
  }
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) fail(ErrorCode::Parse, fmt::format("field '{}' is not a number", key));
  return v.get<double>();
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

// nlohmann exceptions become parse errors so callers only see rapd::Error.
template <class Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, fmt::format("{}: {}", what, e.what()));
  }
}

}  // namespace

Json schedule_to_json(const Schedule& s, const CalibrationModel* calibration) {
  Json j;
  j["pause_s"] = s.pause;
  j["dark_adaptation_s"] = s.dark_adaptation;
  j["total_s"] = s.total_duration;
  j["target"] = {{"description", s.target.description},
                 {"plane_size_m", s.target.plane_size_m},
                 {"start_distance_m", s.target.start_distance_m},
                 {"end_distance_m", s.target.end_distance_m}};
  Json intervals = Json::array();
  for (const auto& iv : s.intervals) {
    Json e;
    e["start_s"] = iv.start;
    e["duration_s"] = iv.duration;
    e["eye"] = to_string(iv.illuminated_eye);
    e["transmittance"] = iv.transmittance.value;
    e["level_x"] = iv.level_x.value;
    e["repetition"] = iv.repetition_index;
    e["level_index"] = iv.level_index;
    if (calibration) e["drive"] = drive_for_transmittance(*calibration, iv.transmittance);
    intervals.push_back(std::move(e));
  }
  j["intervals"] = std::move(intervals);
  return j;
}

Schedule schedule_from_json(const Json& j) {
  return guarded("schedule", [&] {
    const double pause = number(j, "pause_s");
    const double dark = number(j, "dark_adaptation_s");
    const Json& arr = field(j, "intervals");
    if (!arr.is_array()) fail(ErrorCode::Parse, "'intervals' is not an array");

    std::vector<IlluminationInterval> intervals;
    int level = 0;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Json& e = arr[i];
      IlluminationInterval iv;
      iv.start = number(e, "start_s");
      iv.duration = number(e, "duration_s");
      iv.illuminated_eye = eye_from_string(field(e, "eye").get<std::string>());
      iv.transmittance = Transmittance{number(e, "transmittance")};
      iv.level_x = LogUnits{number(e, "level_x")};
      iv.repetition_index = field(e, "repetition").get<int>();
      if (e.contains("level_index")) {
        iv.level_index = e.at("level_index").get<int>();
      } else {
        // Older exports: a new level starts whenever x changes.
        if (i > 0 && iv.level_x.value != intervals.back().level_x.value) ++level;
        iv.level_index = level;
      }
      intervals.push_back(iv);
    }
    Schedule s = schedule_from_intervals(pause, dark, std::move(intervals));
    if (j.contains("total_s") && std::abs(j.at("total_s").get<double>() - s.total_duration) > 1e-9) {
      fail(ErrorCode::Parse, "'total_s' disagrees with the interval list");
    }
    return s;
  });
}

Json calibration_to_json(const CalibrationModel& m) {
  Json j;
  j["offset_a"] = m.offset_a;
  j["slope_b"] = m.slope_b;
  j["pearson_r"] = m.pearson_r;
  j["reference_drive"] = m.reference_drive;
  j["reference_luminance"] = m.reference_luminance;
  return j;
}

CalibrationModel calibration_from_json(const Json& j) {
  return guarded("calibration", [&] {
    CalibrationModel m;
    m.offset_a = number(j, "offset_a");
    m.slope_b = number(j, "slope_b");
    m.pearson_r = number(j, "pearson_r");
    m.reference_drive = number(j, "reference_drive");
    m.reference_luminance = number(j, "reference_luminance");
    return m;
  });
}

Json report_to_json(const RapdReport& r) {
  Json j;
  Json levels = Json::array();
  for (const auto& l : r.level_scores) {
    levels.push_back({{"x", l.level_x.value},
                      {"score", l.score.value},
                      {"ca_right", l.ca_right_illum},
                      {"ca_left", l.ca_left_illum}});
  }
  j["level_scores"] = std::move(levels);
  j["slope"] = r.slope;
  j["y_intercept"] = r.y_intercept;
  j["final_score"] = r.final_score.value;
  j["classification"] = to_string(r.classification);
  Json dropped = Json::array();
  for (const auto& d : r.dropped_levels) {
    dropped.push_back({{"level_index", d.level_index}, {"x", d.level_x.value}, {"reason", d.reason}});
  }
  j["dropped_levels"] = std::move(dropped);
  j["dropped_intervals"] = r.dropped_intervals;
  j["censored_intervals"] = r.censored_intervals;
  j["removed_rows"] = r.removed_rows;
  j["pipeline_params"] = {
      {"blink_window", r.params.signal.blink_window},
      {"blink_velocity", r.params.signal.blink_velocity},
      {"smooth_sigma", r.params.signal.smooth_sigma},
      {"min_retained_fraction", r.params.signal.min_retained_fraction},
      {"censor_guard", r.params.signal.censor_guard},
      {"ca_mode", r.params.ca_mode == CaMode::DirectOnly ? "direct_only" : "averaged"}};
  return j;
}

RapdReport report_from_json(const Json& j) {
  return guarded("report", [&] {
    RapdReport r;
    for (const Json& l : field(j, "level_scores")) {
      r.level_scores.push_back(LevelScore{LogUnits{number(l, "x")}, LogUnits{number(l, "score")},
                                          number(l, "ca_right"), number(l, "ca_left")});
    }
    r.slope = number(j, "slope");
    r.y_intercept = number(j, "y_intercept");
    r.final_score = LogUnits{number(j, "final_score")};
    r.classification = classification_from_string(field(j, "classification").get<std::string>());
    if (j.contains("dropped_levels")) {
      for (const Json& d : j.at("dropped_levels")) {
        r.dropped_levels.push_back(DroppedLevel{field(d, "level_index").get<int>(),
                                                LogUnits{number(d, "x")},
                                                field(d, "reason").get<std::string>()});
      }
    }
    if (j.contains("dropped_intervals")) {
      r.dropped_intervals = j.at("dropped_intervals").get<std::vector<std::size_t>>();
    }
    if (j.contains("censored_intervals")) {
      r.censored_intervals = j.at("censored_intervals").get<std::vector<std::size_t>>();
    }
    if (j.contains("removed_rows")) r.removed_rows = j.at("removed_rows").get<std::size_t>();
    if (j.contains("pipeline_params")) {
      const Json& p = j.at("pipeline_params");
      r.params.signal.blink_window = field(p, "blink_window").get<int>();
      r.params.signal.blink_velocity = number(p, "blink_velocity");
      r.params.signal.smooth_sigma = number(p, "smooth_sigma");
      r.params.signal.min_retained_fraction = number(p, "min_retained_fraction");
      if (p.contains("censor_guard")) r.params.signal.censor_guard = field(p, "censor_guard").get<int>();
      r.params.ca_mode = field(p, "ca_mode").get<std::string>() == "direct_only"
                             ? CaMode::DirectOnly
                             : CaMode::Averaged;
    }
    return r;
  });
}

Json cohort_to_json(const CohortRun& run) {
  const CohortMetrics& m = run.metrics;
  Json j;
  j["accuracy"] = run.outcomes.empty() ? Json(nullptr) : Json(m.accuracy);
  j["sensitivity"] = optional_number(m.sensitivity);
  j["specificity"] = optional_number(m.specificity);
  j["tp"] = m.tp;
  j["fn"] = m.fn;
  j["tn"] = m.tn;
  j["fp"] = m.fp;
  j["eye_agreement"] = optional_number(m.eye_agreement);
  Json outcomes = Json::array();
  for (const auto& o : run.outcomes) {
    std::string label = o.true_label == TrueLabel::Negative ? "negative" : "positive";
    if (o.affected_eye) label += std::string("_") + to_string(*o.affected_eye);
    outcomes.push_back({{"subject", o.subject},
                        {"label", label},
                        {"predicted", to_string(o.predicted)},
                        {"final_score", o.final_score}});
  }
  j["outcomes"] = std::move(outcomes);
  Json failures = Json::array();
  for (const auto& f : run.failures) {
    failures.push_back({{"subject", f.subject}, {"error", f.message}});
  }
  j["failures"] = std::move(failures);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json load_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, fmt::format("{}: {}", path, e.what()));
  }
}

void save_json_file(const Json& j, const std::string& path) { write_text_file(path, dump(j)); }

}  // namespace rapd
