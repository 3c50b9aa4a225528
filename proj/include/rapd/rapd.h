/*
 * C interface to the rapd library: swinging-light protocol schedules, pupil
 * session simulation, RAPD scoring and cohort evaluation.
 *
 * Objects are opaque handles created by rapd_*_create / _read / _build
 * functions and released with the matching rapd_*_free. Every fallible call
 * returns a rapd_status; on failure rapd_last_error() describes the problem
 * (per thread, valid until the next failing call on that thread).
 */
#ifndef RAPD_RAPD_H
#define RAPD_RAPD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RAPD_BUILDING_LIBRARY)
#    define RAPD_API __declspec(dllexport)
#  else
#    define RAPD_API __declspec(dllimport)
#  endif
#else
#  define RAPD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rapd_status {
  RAPD_OK = 0,
  RAPD_ERR_DOMAIN = 1,
  RAPD_ERR_RANGE = 2,
  RAPD_ERR_FIT = 3,
  RAPD_ERR_PROTOCOL = 4,
  RAPD_ERR_PARSE = 5,
  RAPD_ERR_IO = 6,
  RAPD_ERR_UNRESOLVABLE_SCORE = 7,
  RAPD_ERR_INTERVAL_DROPOUT = 8,
  RAPD_ERR_LEVEL_DROPOUT = 9,
  RAPD_ERR_INSUFFICIENT_DATA = 10,
  RAPD_ERR_DEGENERATE_FIT = 11,
  RAPD_ERR_FLAT_RESPONSE = 12,
  RAPD_ERR_INVALID_ARGUMENT = 13,
  RAPD_ERR_INTERNAL = 99
} rapd_status;

typedef enum rapd_eye { RAPD_EYE_RIGHT = 0, RAPD_EYE_LEFT = 1 } rapd_eye;

typedef enum rapd_classification {
  RAPD_NEGATIVE = 0,
  RAPD_POSITIVE_LEFT = 1,
  RAPD_POSITIVE_RIGHT = 2
} rapd_classification;

typedef struct rapd_schedule rapd_schedule;
typedef struct rapd_session rapd_session;
typedef struct rapd_calibration rapd_calibration;
typedef struct rapd_report rapd_report;
typedef struct rapd_cohort rapd_cohort;

RAPD_API const char* rapd_last_error(void);
RAPD_API const char* rapd_status_string(rapd_status status);
RAPD_API const char* rapd_version(void);

/* ---- units ------------------------------------------------------------- */

RAPD_API rapd_status rapd_od_to_transmittance(double od, double* transmittance);
RAPD_API rapd_status rapd_transmittance_to_od(double transmittance, double* od);
RAPD_API rapd_status rapd_percent_change_ca(double max_mm, double min_mm, double* ca);
RAPD_API rapd_status rapd_score_from_ca(double ca_right_illum, double ca_left_illum,
                                        double* score);

/* ---- protocol ---------------------------------------------------------- */

/* Built-in protocol with the given pause (>= 2 s). */
RAPD_API rapd_status rapd_schedule_build(double pause_s, rapd_schedule** out);
/* protocol 1 = 3 s pause, protocol 2 = 2 s pause. */
RAPD_API rapd_status rapd_schedule_build_protocol(int protocol, rapd_schedule** out);
RAPD_API rapd_status rapd_schedule_read_json(const char* path, rapd_schedule** out);
/* calibration may be NULL; when given each interval also lists its drive. */
RAPD_API rapd_status rapd_schedule_write_json(const rapd_schedule* s,
                                              const rapd_calibration* calibration,
                                              const char* path);
RAPD_API rapd_status rapd_schedule_mirror(const rapd_schedule* s, rapd_schedule** out);
RAPD_API double rapd_schedule_total_s(const rapd_schedule* s);
RAPD_API double rapd_schedule_pause_s(const rapd_schedule* s);
RAPD_API size_t rapd_schedule_interval_count(const rapd_schedule* s);
RAPD_API size_t rapd_schedule_level_count(const rapd_schedule* s);
RAPD_API rapd_status rapd_schedule_level_x(const rapd_schedule* s, size_t level, double* x);
RAPD_API rapd_status rapd_schedule_illumination_at(const rapd_schedule* s, double t,
                                                   double* left, double* right);
RAPD_API void rapd_schedule_free(rapd_schedule* s);

/* ---- simulation -------------------------------------------------------- */

typedef struct rapd_model_params {
  double d_max;
  double d_min;
  double half_luminance;
  double steepness;
  double tau_constrict;
  double tau_dilate;
  double latency;
  double anisocoria;
  double defect_left;
  double defect_right;
  double noise_sd;
  double blink_rate;
  double blink_duration;
  double sample_rate;
  double tau_adapt;
  double tau_recover;
  double adaptation_floor;
  uint64_t rng_seed;
} rapd_model_params;

RAPD_API void rapd_model_params_default(rapd_model_params* p);
RAPD_API rapd_status rapd_simulate(const rapd_model_params* p, const rapd_schedule* s,
                                   double reference_luminance, rapd_session** out);

/* ---- sessions ---------------------------------------------------------- */

RAPD_API rapd_status rapd_session_read_csv(const char* path, rapd_session** out);
RAPD_API rapd_status rapd_session_write_csv(const rapd_session* s, const char* path);
RAPD_API size_t rapd_session_row_count(const rapd_session* s);
/* Columns: 0 timestamp, 1 illum_right, 2 illum_left, 3 pupil_right, 4 pupil_left. */
RAPD_API rapd_status rapd_session_row(const rapd_session* s, size_t row, double values[5]);
RAPD_API rapd_status rapd_session_mirror(const rapd_session* s, rapd_session** out);
RAPD_API void rapd_session_free(rapd_session* s);

/* ---- calibration ------------------------------------------------------- */

RAPD_API rapd_status rapd_calibration_fit(const double* drives, const double* luminances,
                                          size_t n, double reference_drive,
                                          rapd_calibration** out);
RAPD_API rapd_status rapd_calibration_fit_csv(const char* path, double reference_drive,
                                              rapd_calibration** out);
RAPD_API rapd_status rapd_calibration_read_json(const char* path, rapd_calibration** out);
RAPD_API rapd_status rapd_calibration_write_json(const rapd_calibration* c, const char* path);
RAPD_API rapd_status rapd_calibration_coefficients(const rapd_calibration* c, double* offset_a,
                                                   double* slope_b, double* pearson_r,
                                                   double* reference_drive,
                                                   double* reference_luminance);
RAPD_API rapd_status rapd_calibration_luminance_at(const rapd_calibration* c, double drive,
                                                   double* luminance);
RAPD_API rapd_status rapd_calibration_drive_for_transmittance(const rapd_calibration* c,
                                                              double transmittance,
                                                              double* drive);
RAPD_API void rapd_calibration_free(rapd_calibration* c);

/* ---- scoring ----------------------------------------------------------- */

typedef struct rapd_pipeline_params {
  int blink_window;
  double blink_velocity;
  double smooth_sigma;
  double min_retained_fraction;
  int censor_guard; /* rows; extremes this close to removed rows void the interval */
  int direct_only; /* nonzero: use the illuminated pupil's CA only */
} rapd_pipeline_params;

RAPD_API void rapd_pipeline_params_default(rapd_pipeline_params* p);
/* params may be NULL for defaults. */
RAPD_API rapd_status rapd_score_session(const rapd_session* session,
                                        const rapd_schedule* schedule,
                                        const rapd_pipeline_params* params, rapd_report** out);
RAPD_API rapd_status rapd_report_read_json(const char* path, rapd_report** out);
RAPD_API rapd_status rapd_report_write_json(const rapd_report* r, const char* path);
RAPD_API double rapd_report_final_score(const rapd_report* r);
RAPD_API double rapd_report_slope(const rapd_report* r);
RAPD_API double rapd_report_y_intercept(const rapd_report* r);
RAPD_API rapd_classification rapd_report_classification(const rapd_report* r);
RAPD_API size_t rapd_report_level_count(const rapd_report* r);
RAPD_API rapd_status rapd_report_level(const rapd_report* r, size_t i, double* x, double* score,
                                       double* ca_right, double* ca_left);
RAPD_API size_t rapd_report_dropped_level_count(const rapd_report* r);
RAPD_API void rapd_report_free(rapd_report* r);

RAPD_API rapd_status rapd_final_score(double slope, double y_intercept, double* score);
RAPD_API rapd_classification rapd_classify(double final_score);
RAPD_API const char* rapd_classification_string(rapd_classification c);

/* ---- plots ------------------------------------------------------------- */

RAPD_API rapd_status rapd_plot_regression(const rapd_report* r, const char* path);
RAPD_API rapd_status rapd_plot_trace(const rapd_session* session, const rapd_schedule* schedule,
                                     const rapd_pipeline_params* params, const char* path);

/* ---- cohort ------------------------------------------------------------ */

/* threads == 0 picks the hardware concurrency. */
RAPD_API rapd_status rapd_cohort_run(const char* manifest_path, const rapd_schedule* schedule,
                                     const rapd_pipeline_params* params, unsigned threads,
                                     rapd_cohort** out);
RAPD_API rapd_status rapd_cohort_write_json(const rapd_cohort* c, const char* path);
/* Negative values mean "undefined" (e.g. sensitivity without positives). */
RAPD_API rapd_status rapd_cohort_metrics(const rapd_cohort* c, double* accuracy,
                                         double* sensitivity, double* specificity);
RAPD_API rapd_status rapd_cohort_counts(const rapd_cohort* c, size_t* tp, size_t* fn,
                                        size_t* tn, size_t* fp);
RAPD_API size_t rapd_cohort_failure_count(const rapd_cohort* c);
RAPD_API void rapd_cohort_free(rapd_cohort* c);

#ifdef __cplusplus
}
#endif

#endif /* RAPD_RAPD_H */
