#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "rapd/calibration.hpp"
#include "rapd/cohort.hpp"
#include "rapd/protocol.hpp"
#include "rapd/scoring.hpp"

namespace rapd {

using Json = nlohmann::ordered_json;

/// Schedule export. With a calibration model each interval also carries the
/// display drive that realises its transmittance.
Json schedule_to_json(const Schedule& s, const CalibrationModel* calibration = nullptr);
Schedule schedule_from_json(const Json& j);

Json calibration_to_json(const CalibrationModel& m);
CalibrationModel calibration_from_json(const Json& j);

Json report_to_json(const RapdReport& r);
RapdReport report_from_json(const Json& j);

Json cohort_to_json(const CohortRun& run);

/// Two-space indented, trailing newline. Field order is insertion order.
std::string dump(const Json& j);
Json load_json_file(const std::string& path);
void save_json_file(const Json& j, const std::string& path);

}  // namespace rapd
