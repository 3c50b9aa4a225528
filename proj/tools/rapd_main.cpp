// rapd: command-line front end to librapd.
//
//   rapd schedule  --pause 3 --out schedule.json [--calibration model.json]
//   rapd simulate  --protocol 1 --defect-eye left --defect 0.6 --seed 42 --out s.csv
//   rapd calibrate --samples cal.csv --reference-drive 1 --out model.json
//   rapd score     --session s.csv --schedule schedule.json --report r.json [--plot r.svg]
//   rapd cohort    --manifest cohort.csv --schedule schedule.json --out metrics.json
//   rapd plot      --kind trace --session s.csv --schedule schedule.json --out trace.svg
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "rapd/rapd.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct DataError {
  std::string message;
};

void check(rapd_status status, const char* what) {
  if (status != RAPD_OK) {
    throw DataError{std::string(what) + ": " + rapd_last_error()};
  }
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using SchedulePtr = std::unique_ptr<rapd_schedule, Deleter<rapd_schedule, rapd_schedule_free>>;
using SessionPtr = std::unique_ptr<rapd_session, Deleter<rapd_session, rapd_session_free>>;
using CalibrationPtr =
    std::unique_ptr<rapd_calibration, Deleter<rapd_calibration, rapd_calibration_free>>;
using ReportPtr = std::unique_ptr<rapd_report, Deleter<rapd_report, rapd_report_free>>;
using CohortPtr = std::unique_ptr<rapd_cohort, Deleter<rapd_cohort, rapd_cohort_free>>;

// RAPD_OUTPUT_DIR, when set, prefixes relative output paths.
std::string output_path(const std::string& path) {
  const char* dir = std::getenv("RAPD_OUTPUT_DIR");
  if (!dir || !*dir || std::filesystem::path(path).is_absolute()) return path;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / path).string();
}

SchedulePtr load_schedule(const std::string& path) {
  rapd_schedule* s = nullptr;
  check(rapd_schedule_read_json(path.c_str(), &s), "reading schedule");
  return SchedulePtr(s);
}

SessionPtr load_session(const std::string& path) {
  rapd_session* s = nullptr;
  check(rapd_session_read_csv(path.c_str(), &s), "reading session");
  return SessionPtr(s);
}

CalibrationPtr load_calibration(const std::string& path) {
  if (path.empty()) return nullptr;
  rapd_calibration* c = nullptr;
  check(rapd_calibration_read_json(path.c_str(), &c), "reading calibration");
  return CalibrationPtr(c);
}

void add_pipeline_flags(CLI::App* cmd, rapd_pipeline_params& p) {
  cmd->add_option("--blink-window", p.blink_window, "Blink sliding window (samples, odd)")
      ->capture_default_str();
  cmd->add_option("--blink-velocity", p.blink_velocity, "Blink velocity limit (mm/s)")
      ->capture_default_str();
  cmd->add_option("--smooth-sigma", p.smooth_sigma, "Gaussian sigma (samples)")
      ->capture_default_str();
  cmd->add_option("--min-retained", p.min_retained_fraction,
                  "Minimum fraction of an interval's samples kept after blink removal")
      ->capture_default_str();
  cmd->add_option("--censor-guard", p.censor_guard,
                  "Drop an interval when an extreme lies this many rows from removed data")
      ->capture_default_str();
  cmd->add_flag("--direct-only", p.direct_only,
                "Use the illuminated pupil's constriction only (no consensual averaging)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swinging-light RAPD protocol, simulation and scoring tools"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  bool verbose = false;
  app.add_option("--seed", seed, "Random seed for simulation")->capture_default_str();
  app.add_flag("--verbose,-v", verbose, "Print progress details");

  // schedule
  auto* schedule_cmd = app.add_subcommand("schedule", "Export a protocol schedule as JSON");
  double pause = 3.0;
  std::string schedule_out;
  std::string schedule_calibration;
  schedule_cmd->add_option("--pause", pause, "Pause time in seconds (2 or 3)")
      ->check(CLI::IsMember({2.0, 3.0}))
      ->capture_default_str();
  schedule_cmd->add_option("--out", schedule_out, "Output JSON path")->required();
  schedule_cmd->add_option("--calibration", schedule_calibration,
                           "Calibration model JSON; adds display drive values");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a pupil recording");
  rapd_model_params model{};
  rapd_model_params_default(&model);
  int protocol = 1;
  std::string defect_eye = "none";
  double defect = 0.0;
  double reference_luminance = 97.8;
  std::string simulate_out;
  std::string simulate_calibration;
  simulate_cmd->add_option("--protocol", protocol, "1 (3 s pause) or 2 (2 s pause)")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  simulate_cmd->add_option("--defect-eye", defect_eye, "Eye carrying the afferent defect")
      ->check(CLI::IsMember({"none", "left", "right"}))
      ->capture_default_str();
  simulate_cmd->add_option("--defect", defect, "Defect size in log units")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate_cmd->add_option("--reference-luminance", reference_luminance,
                           "Luminance of an unattenuated eye (cd/m^2)")
      ->capture_default_str();
  simulate_cmd->add_option("--out", simulate_out, "Output session CSV")->required();
  simulate_cmd->add_option("--calibration", simulate_calibration,
                           "Calibration model JSON; prints the drive for each level");
  simulate_cmd->add_option("--d-max", model.d_max, "Dark diameter (mm)")->capture_default_str();
  simulate_cmd->add_option("--d-min", model.d_min, "Constricted diameter (mm)")->capture_default_str();
  simulate_cmd->add_option("--half-luminance", model.half_luminance, "Half-response drive (cd/m^2)")
      ->capture_default_str();
  simulate_cmd->add_option("--steepness", model.steepness)->capture_default_str();
  simulate_cmd->add_option("--tau-constrict", model.tau_constrict, "s")->capture_default_str();
  simulate_cmd->add_option("--tau-dilate", model.tau_dilate, "s")->capture_default_str();
  simulate_cmd->add_option("--latency", model.latency, "s")->capture_default_str();
  simulate_cmd->add_option("--anisocoria", model.anisocoria, "Right minus left (mm)")
      ->capture_default_str();
  simulate_cmd->add_option("--noise-sd", model.noise_sd, "mm")->capture_default_str();
  simulate_cmd->add_option("--blink-rate", model.blink_rate, "Blinks per second")
      ->capture_default_str();
  simulate_cmd->add_option("--blink-duration", model.blink_duration, "s")->capture_default_str();
  simulate_cmd->add_option("--sample-rate", model.sample_rate, "Hz")->capture_default_str();
  simulate_cmd->add_option("--tau-adapt", model.tau_adapt, "Retinal light adaptation (s)")
      ->capture_default_str();
  simulate_cmd->add_option("--tau-recover", model.tau_recover, "Retinal dark recovery (s)")
      ->capture_default_str();
  simulate_cmd->add_option("--adaptation-floor", model.adaptation_floor,
                           "Residual retinal gain under sustained light")
      ->capture_default_str();

  // calibrate
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit the drive-to-luminance model");
  std::string samples_path;
  double reference_drive = 1.0;
  std::string calibrate_out;
  calibrate_cmd->add_option("--samples", samples_path, "CSV with header drive,luminance")
      ->required()
      ->check(CLI::ExistingFile);
  calibrate_cmd->add_option("--reference-drive", reference_drive,
                            "Drive treated as zero optical density")
      ->capture_default_str();
  calibrate_cmd->add_option("--out", calibrate_out, "Output model JSON")->required();

  // score
  auto* score_cmd = app.add_subcommand("score", "Score one session");
  rapd_pipeline_params pipeline{};
  rapd_pipeline_params_default(&pipeline);
  std::string session_path;
  std::string schedule_path;
  std::string report_out;
  std::string plot_out;
  score_cmd->add_option("--session", session_path, "Session CSV")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--schedule", schedule_path, "Schedule JSON")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--report", report_out, "Output report JSON")->required();
  score_cmd->add_option("--plot", plot_out, "Also write the regression plot (SVG)");
  add_pipeline_flags(score_cmd, pipeline);

  // cohort
  auto* cohort_cmd = app.add_subcommand("cohort", "Score a labelled cohort");
  std::string manifest_path;
  std::string cohort_out;
  unsigned threads = 0;
  cohort_cmd->add_option("--manifest", manifest_path, "CSV subject,session_path,label")
      ->required()
      ->check(CLI::ExistingFile);
  cohort_cmd->add_option("--schedule", schedule_path, "Schedule JSON")->required()->check(CLI::ExistingFile);
  cohort_cmd->add_option("--out", cohort_out, "Output metrics JSON")->required();
  cohort_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  add_pipeline_flags(cohort_cmd, pipeline);

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "Render a trace or regression plot");
  std::string kind = "regression";
  std::string report_in;
  std::string plot_path;
  plot_cmd->add_option("--kind", kind, "trace or regression")
      ->check(CLI::IsMember({"trace", "regression"}))
      ->capture_default_str();
  plot_cmd->add_option("--report", report_in, "Report JSON (regression)")->check(CLI::ExistingFile);
  plot_cmd->add_option("--session", session_path, "Session CSV (trace)")->check(CLI::ExistingFile);
  plot_cmd->add_option("--schedule", schedule_path, "Schedule JSON (trace)")->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_path, "Output SVG")->required();
  add_pipeline_flags(plot_cmd, pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*schedule_cmd) {
      rapd_schedule* raw = nullptr;
      check(rapd_schedule_build(pause, &raw), "building schedule");
      SchedulePtr s(raw);
      auto cal = load_calibration(schedule_calibration);
      const std::string out = output_path(schedule_out);
      check(rapd_schedule_write_json(s.get(), cal.get(), out.c_str()), "writing schedule");
      if (verbose) {
        std::printf("%zu intervals, %.1f s total -> %s\n", rapd_schedule_interval_count(s.get()),
                    rapd_schedule_total_s(s.get()), out.c_str());
      }
    } else if (*simulate_cmd) {
      rapd_schedule* raw = nullptr;
      check(rapd_schedule_build_protocol(protocol, &raw), "building schedule");
      SchedulePtr s(raw);
      model.rng_seed = seed;
      if (defect_eye == "left") model.defect_left = defect;
      if (defect_eye == "right") model.defect_right = defect;
      if (defect_eye == "none" && defect != 0.0) {
        std::fprintf(stderr, "--defect given without --defect-eye; ignoring\n");
      }
      rapd_session* sess = nullptr;
      check(rapd_simulate(&model, s.get(), reference_luminance, &sess), "simulating");
      SessionPtr session(sess);
      const std::string out = output_path(simulate_out);
      check(rapd_session_write_csv(session.get(), out.c_str()), "writing session");
      if (auto cal = load_calibration(simulate_calibration)) {
        for (double t : {1.0, 0.5, 0.25}) {
          double drive = 0.0;
          check(rapd_calibration_drive_for_transmittance(cal.get(), t, &drive), "drive");
          std::printf("transmittance %.2f -> drive %.6f\n", t, drive);
        }
      }
      if (verbose) {
        std::printf("%zu rows -> %s\n", rapd_session_row_count(session.get()), out.c_str());
      }
    } else if (*calibrate_cmd) {
      rapd_calibration* raw = nullptr;
      check(rapd_calibration_fit_csv(samples_path.c_str(), reference_drive, &raw), "fitting");
      CalibrationPtr cal(raw);
      const std::string out = output_path(calibrate_out);
      check(rapd_calibration_write_json(cal.get(), out.c_str()), "writing model");
      double a = 0, b = 0, r = 0, rd = 0, rl = 0;
      rapd_calibration_coefficients(cal.get(), &a, &b, &r, &rd, &rl);
      if (verbose || r < 0.99) {
        std::printf("L = %.4f + %.4f ln(v), r = %.5f, L(%.3g) = %.3f\n", a, b, r, rd, rl);
      }
    } else if (*score_cmd) {
      auto session = load_session(session_path);
      auto s = load_schedule(schedule_path);
      rapd_report* raw = nullptr;
      check(rapd_score_session(session.get(), s.get(), &pipeline, &raw), "scoring");
      ReportPtr report(raw);
      const std::string out = output_path(report_out);
      check(rapd_report_write_json(report.get(), out.c_str()), "writing report");
      if (!plot_out.empty()) {
        check(rapd_plot_regression(report.get(), output_path(plot_out).c_str()), "plotting");
      }
      std::printf("final score %+.3f log units: %s\n", rapd_report_final_score(report.get()),
                  rapd_classification_string(rapd_report_classification(report.get())));
    } else if (*cohort_cmd) {
      auto s = load_schedule(schedule_path);
      rapd_cohort* raw = nullptr;
      check(rapd_cohort_run(manifest_path.c_str(), s.get(), &pipeline, threads, &raw), "cohort");
      CohortPtr cohort(raw);
      check(rapd_cohort_write_json(cohort.get(), output_path(cohort_out).c_str()), "writing metrics");
      double acc = 0, sens = 0, spec = 0;
      rapd_cohort_metrics(cohort.get(), &acc, &sens, &spec);
      std::printf("accuracy %.4f  sensitivity %s  specificity %s  (%zu failed)\n", acc,
                  sens < 0 ? "n/a" : std::to_string(sens).c_str(),
                  spec < 0 ? "n/a" : std::to_string(spec).c_str(),
                  rapd_cohort_failure_count(cohort.get()));
    } else if (*plot_cmd) {
      const std::string out = output_path(plot_path);
      if (kind == "regression") {
        if (report_in.empty()) {
          std::fprintf(stderr, "plot --kind regression needs --report\n");
          return kExitUsage;
        }
        rapd_report* raw = nullptr;
        check(rapd_report_read_json(report_in.c_str(), &raw), "reading report");
        ReportPtr report(raw);
        check(rapd_plot_regression(report.get(), out.c_str()), "plotting");
      } else {
        if (session_path.empty() || schedule_path.empty()) {
          std::fprintf(stderr, "plot --kind trace needs --session and --schedule\n");
          return kExitUsage;
        }
        auto session = load_session(session_path);
        auto s = load_schedule(schedule_path);
        check(rapd_plot_trace(session.get(), s.get(), &pipeline, out.c_str()), "plotting");
      }
    }
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return 0;
}
