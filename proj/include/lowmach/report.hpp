#pragma once

// CSV/JSON export of sweep tables and JSON trajectory files.

#include "lowmach/sweep.hpp"

#include <iosfwd>
#include <json.hpp>
#include <string>

namespace lowmach {

const std::vector<std::string>& csv_columns();

void write_csv(const ReportTable& table, std::ostream& out);
nlohmann::json to_json(const ReportTable& table);
/// Inverse of to_json. Throws ConfigError on a schema mismatch.
ReportTable table_from_json(const nlohmann::json& j);

/// Writes report.csv or report.json into `dir` (created if missing) and
/// returns the path.
std::string write_report(const ReportTable& table, const std::string& dir, const std::string& format);

/// Full trajectory: samples, step records, termination. Non-finite numbers
/// are stored as null and read back as NaN.
nlohmann::json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);
void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

} // namespace lowmach
