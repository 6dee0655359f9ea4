#pragma once

#include "krf/scenario.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace krf {

inline constexpr const char* kReportSchema = "krflab.report/1";

/// Structured run report; `wall_clock` toggles the only non-reproducible field.
nlohmann::ordered_json report_json(const RunResult& r, bool wall_clock = true);
nlohmann::ordered_json to_json(const InequalityReport& r);
nlohmann::ordered_json to_json(const AsymptoticFit& f);
nlohmann::ordered_json to_json(const LimitProfile& p);

/// One row per snapshot in the documented column order.
std::string trajectory_csv(const Trajectory& tr);
/// Column-oriented plot data: one `# name` block per series.
std::string plot_data(const RunResult& r);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Writes trajectory.csv, report.json and plot.gp-data into `dir`.
void write_run_outputs(const RunResult& r, const std::filesystem::path& dir);

}  // namespace krf
