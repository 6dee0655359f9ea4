#pragma once

#include "krf/estimates.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace krf {

/// Fully determines a run. Text form: one `key = value` per line, keys
/// dotted by section (`grid.nodes = 512`) or grouped under `[grid]` headers;
/// `#` starts a comment; lists are comma separated.
struct ScenarioConfig {
  std::string id = "scenario";
  std::string model;
  std::vector<std::string> omega0;  // exact rational literals
  BackendSettings backend;
  StepController controller;
  /// Report suites: essential, volume_form, lower_bound, schwarz, collapsing,
  /// fit, limit_profile, curvature.
  std::vector<std::string> suites;
  std::vector<LowerBoundMode> lower_bound_modes{LowerBoundMode::SemiAmple};
  /// Refinements for the stability verdicts: dt, N, eps, R.
  std::vector<std::string> refinements;
  std::string out_dir = "out";

  /// Golden comparisons (unset entries are not checked).
  std::optional<int> expect_k;
  std::optional<std::string> expect_regime;
  std::optional<double> expect_T;
  double expect_k_hat_tolerance = 0.15;

  KahlerClass kahler_class() const;
  bool has_suite(const std::string& s) const;
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);
/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const ScenarioConfig& c);

struct Preset {
  std::string name;
  std::string regime;  // expected regime, as printed by describe()
  std::string summary;
  std::string text;    // config text
};

const std::vector<Preset>& presets();
ScenarioConfig preset_config(const std::string& name);

/// Config with one refinement applied, or nullopt when it does not apply
/// (no grid to refine, no singular time, no truncated line).
std::optional<ScenarioConfig> refined_config(const ScenarioConfig& c, const std::string& label);

struct GoldenCheck {
  std::string name;
  std::string expected, actual;
  bool pass = false;
};

struct SuiteResult {
  std::vector<InequalityReport> reports;
  std::optional<AsymptoticFit> fit;
  std::optional<LimitProfile> profile;
  std::vector<std::string> errors;  // suites that could not be evaluated
};

SuiteResult evaluate_suites(const Trajectory& tr, const ScenarioConfig& c);

struct RunResult {
  ScenarioConfig config;
  Trajectory trajectory;
  SuiteResult suites;
  std::vector<std::string> refinements_run;
  std::vector<GoldenCheck> golden;
  /// Verdict-bearing checks that failed.
  std::vector<std::string> failures;
  double wall_seconds = 0.0;
  int exit_code = 0;
};

/// Report names whose verdict must be Diverges.
bool expects_divergence(const std::string& report_name);
/// Report names that are measured only and carry no verdict.
bool measured_only(const std::string& report_name);

RunResult run_scenario(const ScenarioConfig& c);

struct SweepRow {
  std::vector<std::string> coords;
  bool in_cone = false;
  double T = 0.0;
  int k = 0;
  std::string regime;
  std::optional<double> inf_u;
};

/// Axis specs separated by ';': `a:b:n` (n evenly spaced exact rationals) or `v1,v2,...`.
std::vector<std::vector<std::string>> parse_sweep_grid(const std::string& spec, std::size_t coordinates);
std::vector<SweepRow> sweep(const std::string& model, const std::string& grid_spec, bool run_flow,
                            const ScenarioConfig& base = {});

}  // namespace krf
