#include "rapd/rapd.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "rapd/calibration.hpp"
#include "rapd/cohort.hpp"
#include "rapd/error.hpp"
#include "rapd/formats.hpp"
#include "rapd/plot.hpp"
#include "rapd/plr_sim.hpp"
#include "rapd/protocol.hpp"
#include "rapd/scoring.hpp"
#include "rapd/session_io.hpp"
#include "rapd/units.hpp"

struct rapd_schedule {
  rapd::Schedule value;
};
struct rapd_session {
  rapd::Session value;
};
struct rapd_calibration {
  rapd::CalibrationModel value;
};
struct rapd_report {
  rapd::RapdReport value;
};
struct rapd_cohort {
  rapd::CohortRun value;
};

namespace {

thread_local std::string g_last_error;

rapd_status status_of(rapd::ErrorCode code) {
  using rapd::ErrorCode;
  switch (code) {
    case ErrorCode::Domain: return RAPD_ERR_DOMAIN;
    case ErrorCode::Range: return RAPD_ERR_RANGE;
    case ErrorCode::Fit: return RAPD_ERR_FIT;
    case ErrorCode::Protocol: return RAPD_ERR_PROTOCOL;
    case ErrorCode::Parse: return RAPD_ERR_PARSE;
    case ErrorCode::Io: return RAPD_ERR_IO;
    case ErrorCode::UnresolvableScore: return RAPD_ERR_UNRESOLVABLE_SCORE;
    case ErrorCode::IntervalDropout: return RAPD_ERR_INTERVAL_DROPOUT;
    case ErrorCode::LevelDropout: return RAPD_ERR_LEVEL_DROPOUT;
    case ErrorCode::InsufficientData: return RAPD_ERR_INSUFFICIENT_DATA;
    case ErrorCode::DegenerateFit: return RAPD_ERR_DEGENERATE_FIT;
    case ErrorCode::FlatResponse: return RAPD_ERR_FLAT_RESPONSE;
    case ErrorCode::InvalidArgument: return RAPD_ERR_INVALID_ARGUMENT;
  }
  return RAPD_ERR_INTERNAL;
}

rapd_status set_error(rapd_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Runs fn, translating every exception into a status. Nothing escapes the
// C boundary.
template <class Fn>
rapd_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RAPD_OK;
  } catch (const rapd::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RAPD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RAPD_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(RAPD_ERR_INTERNAL, "unknown exception");
  }
}

#define RAPD_REQUIRE(ptr)                                                         \
  do {                                                                            \
    if (!(ptr)) return set_error(RAPD_ERR_INVALID_ARGUMENT, #ptr " is NULL");     \
  } while (0)

rapd::PupilModelParams to_cpp(const rapd_model_params& p) {
  rapd::PupilModelParams q;
  q.d_max = p.d_max;
  q.d_min = p.d_min;
  q.half_luminance = p.half_luminance;
  q.steepness = p.steepness;
  q.tau_constrict = p.tau_constrict;
  q.tau_dilate = p.tau_dilate;
  q.latency = p.latency;
  q.anisocoria = p.anisocoria;
  q.defect_left = p.defect_left;
  q.defect_right = p.defect_right;
  q.noise_sd = p.noise_sd;
  q.blink_rate = p.blink_rate;
  q.blink_duration = p.blink_duration;
  q.sample_rate = p.sample_rate;
  q.tau_adapt = p.tau_adapt;
  q.tau_recover = p.tau_recover;
  q.adaptation_floor = p.adaptation_floor;
  q.rng_seed = p.rng_seed;
  return q;
}

rapd::PipelineParams to_cpp(const rapd_pipeline_params* p) {
  rapd::PipelineParams q;
  if (!p) return q;
  q.signal.blink_window = p->blink_window;
  q.signal.blink_velocity = p->blink_velocity;
  q.signal.smooth_sigma = p->smooth_sigma;
  q.signal.min_retained_fraction = p->min_retained_fraction;
  q.signal.censor_guard = p->censor_guard;
  q.ca_mode = p->direct_only ? rapd::CaMode::DirectOnly : rapd::CaMode::Averaged;
  return q;
}

rapd_classification to_c(rapd::Classification c) {
  switch (c) {
    case rapd::Classification::PositiveLeft: return RAPD_POSITIVE_LEFT;
    case rapd::Classification::PositiveRight: return RAPD_POSITIVE_RIGHT;
    case rapd::Classification::Negative: break;
  }
  return RAPD_NEGATIVE;
}

template <class Handle, class Value>
void emit(Handle** out, Value&& v) {
  *out = new Handle{std::forward<Value>(v)};
}

}  // namespace

extern "C" {

const char* rapd_last_error(void) { return g_last_error.c_str(); }

const char* rapd_status_string(rapd_status status) {
  switch (status) {
    case RAPD_OK: return "ok";
    case RAPD_ERR_INTERNAL: return "internal error";
    default: break;
  }
  const auto code = static_cast<rapd::ErrorCode>(static_cast<int>(status) - 1);
  if (status >= RAPD_ERR_DOMAIN && status <= RAPD_ERR_INVALID_ARGUMENT) {
    return rapd::to_string(code).data();
  }
  return "unknown status";
}

const char* rapd_version(void) { return "0.1.0"; }

rapd_status rapd_od_to_transmittance(double od, double* transmittance) {
  RAPD_REQUIRE(transmittance);
  return guard([&] { *transmittance = rapd::od_to_transmittance({od}).value; });
}

rapd_status rapd_transmittance_to_od(double transmittance, double* od) {
  RAPD_REQUIRE(od);
  return guard([&] { *od = rapd::transmittance_to_od({transmittance}).value; });
}

rapd_status rapd_percent_change_ca(double max_mm, double min_mm, double* ca) {
  RAPD_REQUIRE(ca);
  return guard([&] { *ca = rapd::percent_change_ca(max_mm, min_mm); });
}

rapd_status rapd_score_from_ca(double ca_right_illum, double ca_left_illum, double* score) {
  RAPD_REQUIRE(score);
  return guard([&] { *score = rapd::rapd_score_from_ca(ca_right_illum, ca_left_illum).value; });
}

rapd_status rapd_schedule_build(double pause_s, rapd_schedule** out) {
  RAPD_REQUIRE(out);
  return guard([&] { emit(out, rapd::build_protocol(pause_s)); });
}

rapd_status rapd_schedule_build_protocol(int protocol, rapd_schedule** out) {
  RAPD_REQUIRE(out);
  return guard([&] { emit(out, rapd::build_protocol(rapd::protocol_pause(protocol))); });
}

rapd_status rapd_schedule_read_json(const char* path, rapd_schedule** out) {
  RAPD_REQUIRE(path);
  RAPD_REQUIRE(out);
  return guard([&] { emit(out, rapd::schedule_from_json(rapd::load_json_file(path))); });
}

rapd_status rapd_schedule_write_json(const rapd_schedule* s, const rapd_calibration* calibration,
                                     const char* path) {
  RAPD_REQUIRE(s);
  RAPD_REQUIRE(path);
  return guard([&] {
    rapd::save_json_file(
        rapd::schedule_to_json(s->value, calibration ? &calibration->value : nullptr), path);
  });
}

rapd_status rapd_schedule_mirror(const rapd_schedule* s, rapd_schedule** out) {
  RAPD_REQUIRE(s);
  RAPD_REQUIRE(out);
  return guard([&] { emit(out, rapd::mirror_schedule(s->value)); });
}

double rapd_schedule_total_s(const rapd_schedule* s) { return s ? s->value.total_duration : 0.0; }
double rapd_schedule_pause_s(const rapd_schedule* s) { return s ? s->value.pause : 0.0; }
size_t rapd_schedule_interval_count(const rapd_schedule* s) {
  return s ? s->value.intervals.size() : 0;
}
size_t rapd_schedule_level_count(const rapd_schedule* s) { return s ? s->value.blocks.size() : 0; }

rapd_status rapd_schedule_level_x(const rapd_schedule* s, size_t level, double* x) {
  RAPD_REQUIRE(s);
  RAPD_REQUIRE(x);
  if (level >= s->value.blocks.size()) {
    return set_error(RAPD_ERR_RANGE, "level index out of range");
  }
  *x = s->value.blocks[level].x_level.value;
  return RAPD_OK;
}

rapd_status rapd_schedule_illumination_at(const rapd_schedule* s, double t, double* left,
                                          double* right) {
  RAPD_REQUIRE(s);
  RAPD_REQUIRE(left);
  RAPD_REQUIRE(right);
  return guard([&] {
    const auto e = rapd::illumination_at(s->value, t);
    *left = e.left;
    *right = e.right;
  });
}

void rapd_schedule_free(rapd_schedule* s) { delete s; }

void rapd_model_params_default(rapd_model_params* p) {
  if (!p) return;
  const rapd::PupilModelParams d;
  p->d_max = d.d_max;
  p->d_min = d.d_min;
  p->half_luminance = d.half_luminance;
  p->steepness = d.steepness;
  p->tau_constrict = d.tau_constrict;
  p->tau_dilate = d.tau_dilate;
  p->latency = d.latency;
  p->anisocoria = d.anisocoria;
  p->defect_left = d.defect_left;
  p->defect_right = d.defect_right;
  p->noise_sd = d.noise_sd;
  p->blink_rate = d.blink_rate;
  p->blink_duration = d.blink_duration;
  p->sample_rate = d.sample_rate;
  p->tau_adapt = d.tau_adapt;
  p->tau_recover = d.tau_recover;
  p->adaptation_floor = d.adaptation_floor;
  p->rng_seed = d.rng_seed;
}

rapd_status rapd_simulate(const rapd_model_params* p, const rapd_schedule* s,
                          double reference_luminance, rapd_session** out) {
  RAPD_REQUIRE(p);
  RAPD_REQUIRE(s);
  RAPD_REQUIRE(out);
  return guard(
      [&] { emit(out, rapd::simulate_session(to_cpp(*p), s->value, reference_luminance)); });
}

rapd_status rapd_session_read_csv(const char* path, rapd_session** out) {
  RAPD_REQUIRE(path);
  RAPD_REQUIRE(out);
  return guard([&] { emit(out, rapd::read_session(path)); });
}

rapd_status rapd_session_write_csv(const rapd_session* s, const char* path) {
  RAPD_REQUIRE(s);
  RAPD_REQUIRE(path);
  return guard([&] { rapd::write_session(s->value, path); });
}

size_t rapd_session_row_count(const rapd_session* s) { return s ? s->value.size() : 0; }

rapd_status rapd_session_row(const rapd_session* s, size_t row, double values[5]) {
  RAPD_REQUIRE(s);
  RAPD_REQUIRE(values);
  const auto& v = s->value;
  if (row >= v.size()) return set_error(RAPD_ERR_RANGE, "row index out of range");
  values[0] = v.timestamp[row];
  values[1] = v.illum_right[row];
  values[2] = v.illum_left[row];
  values[3] = v.pupil_right[row];
  values[4] = v.pupil_left[row];
  return RAPD_OK;
}

rapd_status rapd_session_mirror(const rapd_session* s, rapd_session** out) {
  RAPD_REQUIRE(s);
  RAPD_REQUIRE(out);
  return guard([&] { emit(out, rapd::mirror_session(s->value)); });
}

void rapd_session_free(rapd_session* s) { delete s; }

rapd_status rapd_calibration_fit(const double* drives, const double* luminances, size_t n,
                                 double reference_drive, rapd_calibration** out) {
  RAPD_REQUIRE(out);
  if (n > 0) {
    RAPD_REQUIRE(drives);
    RAPD_REQUIRE(luminances);
  }
  return guard([&] {
    std::vector<rapd::LuminanceSample> samples;
    for (size_t i = 0; i < n; ++i) samples.push_back({drives[i], luminances[i]});
    emit(out, rapd::fit_luminance_model(samples, reference_drive));
  });
}

rapd_status rapd_calibration_fit_csv(const char* path, double reference_drive,
                                     rapd_calibration** out) {
  RAPD_REQUIRE(path);
  RAPD_REQUIRE(out);
  return guard([&] {
    emit(out, rapd::fit_luminance_model(rapd::read_calibration_samples(path), reference_drive));
  });
}

rapd_status rapd_calibration_read_json(const char* path, rapd_calibration** out) {
  RAPD_REQUIRE(path);
  RAPD_REQUIRE(out);
  return guard([&] { emit(out, rapd::calibration_from_json(rapd::load_json_file(path))); });
}

rapd_status rapd_calibration_write_json(const rapd_calibration* c, const char* path) {
  RAPD_REQUIRE(c);
  RAPD_REQUIRE(path);
  return guard([&] { rapd::save_json_file(rapd::calibration_to_json(c->value), path); });
}

rapd_status rapd_calibration_coefficients(const rapd_calibration* c, double* offset_a,
                                          double* slope_b, double* pearson_r,
                                          double* reference_drive, double* reference_luminance) {
  RAPD_REQUIRE(c);
  if (offset_a) *offset_a = c->value.offset_a;
  if (slope_b) *slope_b = c->value.slope_b;
  if (pearson_r) *pearson_r = c->value.pearson_r;
  if (reference_drive) *reference_drive = c->value.reference_drive;
  if (reference_luminance) *reference_luminance = c->value.reference_luminance;
  return RAPD_OK;
}

rapd_status rapd_calibration_luminance_at(const rapd_calibration* c, double drive,
                                          double* luminance) {
  RAPD_REQUIRE(c);
  RAPD_REQUIRE(luminance);
  return guard([&] { *luminance = rapd::luminance_at(c->value, drive); });
}

rapd_status rapd_calibration_drive_for_transmittance(const rapd_calibration* c,
                                                     double transmittance, double* drive) {
  RAPD_REQUIRE(c);
  RAPD_REQUIRE(drive);
  return guard([&] { *drive = rapd::drive_for_transmittance(c->value, {transmittance}); });
}

void rapd_calibration_free(rapd_calibration* c) { delete c; }

void rapd_pipeline_params_default(rapd_pipeline_params* p) {
  if (!p) return;
  const rapd::PipelineParams d;
  p->blink_window = d.signal.blink_window;
  p->blink_velocity = d.signal.blink_velocity;
  p->smooth_sigma = d.signal.smooth_sigma;
  p->min_retained_fraction = d.signal.min_retained_fraction;
  p->censor_guard = d.signal.censor_guard;
  p->direct_only = d.ca_mode == rapd::CaMode::DirectOnly;
}

rapd_status rapd_score_session(const rapd_session* session, const rapd_schedule* schedule,
                               const rapd_pipeline_params* params, rapd_report** out) {
  RAPD_REQUIRE(session);
  RAPD_REQUIRE(schedule);
  RAPD_REQUIRE(out);
  return guard([&] {
    emit(out, rapd::score_session(session->value, schedule->value, to_cpp(params)));
  });
}

rapd_status rapd_report_read_json(const char* path, rapd_report** out) {
  RAPD_REQUIRE(path);
  RAPD_REQUIRE(out);
  return guard([&] { emit(out, rapd::report_from_json(rapd::load_json_file(path))); });
}

rapd_status rapd_report_write_json(const rapd_report* r, const char* path) {
  RAPD_REQUIRE(r);
  RAPD_REQUIRE(path);
  return guard([&] { rapd::save_json_file(rapd::report_to_json(r->value), path); });
}

double rapd_report_final_score(const rapd_report* r) { return r ? r->value.final_score.value : 0.0; }
double rapd_report_slope(const rapd_report* r) { return r ? r->value.slope : 0.0; }
double rapd_report_y_intercept(const rapd_report* r) { return r ? r->value.y_intercept : 0.0; }

rapd_classification rapd_report_classification(const rapd_report* r) {
  return r ? to_c(r->value.classification) : RAPD_NEGATIVE;
}

size_t rapd_report_level_count(const rapd_report* r) {
  return r ? r->value.level_scores.size() : 0;
}

rapd_status rapd_report_level(const rapd_report* r, size_t i, double* x, double* score,
                              double* ca_right, double* ca_left) {
  RAPD_REQUIRE(r);
  if (i >= r->value.level_scores.size()) {
    return set_error(RAPD_ERR_RANGE, "level index out of range");
  }
  const auto& l = r->value.level_scores[i];
  if (x) *x = l.level_x.value;
  if (score) *score = l.score.value;
  if (ca_right) *ca_right = l.ca_right_illum;
  if (ca_left) *ca_left = l.ca_left_illum;
  return RAPD_OK;
}

size_t rapd_report_dropped_level_count(const rapd_report* r) {
  return r ? r->value.dropped_levels.size() : 0;
}

void rapd_report_free(rapd_report* r) { delete r; }

rapd_status rapd_final_score(double slope, double y_intercept, double* score) {
  RAPD_REQUIRE(score);
  return guard([&] { *score = rapd::final_rapd_score(slope, y_intercept).value; });
}

rapd_classification rapd_classify(double final_score) {
  if (final_score != final_score) return RAPD_NEGATIVE;
  return to_c(rapd::classify({final_score}));
}

const char* rapd_classification_string(rapd_classification c) {
  switch (c) {
    case RAPD_POSITIVE_LEFT: return "positive_left";
    case RAPD_POSITIVE_RIGHT: return "positive_right";
    case RAPD_NEGATIVE: break;
  }
  return "negative";
}

rapd_status rapd_plot_regression(const rapd_report* r, const char* path) {
  RAPD_REQUIRE(r);
  RAPD_REQUIRE(path);
  return guard([&] {
    rapd::PlotSpec spec;
    spec.kind = rapd::PlotKind::Regression;
    spec.report = &r->value;
    spec.output_path = path;
    rapd::emit_plot(spec);
  });
}

rapd_status rapd_plot_trace(const rapd_session* session, const rapd_schedule* schedule,
                            const rapd_pipeline_params* params, const char* path) {
  RAPD_REQUIRE(session);
  RAPD_REQUIRE(schedule);
  RAPD_REQUIRE(path);
  return guard([&] {
    rapd::PlotSpec spec;
    spec.kind = rapd::PlotKind::Trace;
    spec.session = &session->value;
    spec.schedule = &schedule->value;
    spec.params = to_cpp(params);
    spec.output_path = path;
    rapd::emit_plot(spec);
  });
}

rapd_status rapd_cohort_run(const char* manifest_path, const rapd_schedule* schedule,
                            const rapd_pipeline_params* params, unsigned threads,
                            rapd_cohort** out) {
  RAPD_REQUIRE(manifest_path);
  RAPD_REQUIRE(schedule);
  RAPD_REQUIRE(out);
  return guard([&] {
    const auto manifest = rapd::read_manifest(manifest_path);
    emit(out, rapd::run_cohort(manifest, schedule->value, to_cpp(params), threads));
  });
}

rapd_status rapd_cohort_write_json(const rapd_cohort* c, const char* path) {
  RAPD_REQUIRE(c);
  RAPD_REQUIRE(path);
  return guard([&] { rapd::save_json_file(rapd::cohort_to_json(c->value), path); });
}

rapd_status rapd_cohort_metrics(const rapd_cohort* c, double* accuracy, double* sensitivity,
                                double* specificity) {
  RAPD_REQUIRE(c);
  const auto& m = c->value.metrics;
  const bool any = !c->value.outcomes.empty();
  if (accuracy) *accuracy = any ? m.accuracy : -1.0;
  if (sensitivity) *sensitivity = m.sensitivity.value_or(-1.0);
  if (specificity) *specificity = m.specificity.value_or(-1.0);
  return RAPD_OK;
}

rapd_status rapd_cohort_counts(const rapd_cohort* c, size_t* tp, size_t* fn, size_t* tn,
                               size_t* fp) {
  RAPD_REQUIRE(c);
  const auto& m = c->value.metrics;
  if (tp) *tp = m.tp;
  if (fn) *fn = m.fn;
  if (tn) *tn = m.tn;
  if (fp) *fp = m.fp;
  return RAPD_OK;
}

size_t rapd_cohort_failure_count(const rapd_cohort* c) {
  return c ? c->value.failures.size() : 0;
}

void rapd_cohort_free(rapd_cohort* c) { delete c; }

}  // extern "C"
