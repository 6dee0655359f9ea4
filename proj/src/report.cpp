#include "krf/report.hpp"

#include "krf/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace krf {

namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON has no inf/nan; they become strings so the field keeps its meaning.
json value(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json series(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(value(x));
  return a;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

}  // namespace

json to_json(const InequalityReport& r) {
  json j;
  j["name"] = r.name;
  j["C"] = value(r.C);
  j["verdict"] = to_string(r.verdict);
  j["holds"] = r.holds;
  json c = json::object();
  for (const auto& nv : r.constants) c[nv.name] = value(nv.value);
  j["constants"] = c;
  j["checked"] = r.checked;
  json refs = json::array();
  for (const auto& x : r.refinements) refs.push_back({{"label", x.label}, {"C", value(x.C)}, {"drift", value(x.drift)}});
  j["refinements"] = refs;
  j["drift_tolerance"] = r.drift_tolerance;
  j["t"] = series(r.t);
  j["margin"] = series(r.margin);
  return j;
}

json to_json(const AsymptoticFit& f) {
  return {{"target", f.target},
          {"model", f.model},
          {"k_hat", value(f.k_hat)},
          {"k_reference", f.k_reference},
          {"relative_error", value(f.relative_error())},
          {"c0", value(f.c0)},
          {"window", {value(f.window_begin), value(f.window_end)}},
          {"samples", f.samples},
          {"residual", value(f.residual)},
          {"k_hat_mean", value(f.k_hat_mean)},
          {"k_hat_volume", value(f.k_hat_volume)}};
}

json to_json(const LimitProfile& p) {
  json sets = json::array();
  for (const auto& s : p.sets)
    sets.push_back({{"A", s.A},
                    {"count", s.count},
                    {"fraction", value(s.fraction)},
                    {"coord_min", value(s.coord_min)},
                    {"coord_max", value(s.coord_max)},
                    {"coord_mean", value(s.coord_mean)},
                    {"nested_in_t", s.nested_in_t}});
  return {{"t", p.field.t},         {"C", value(p.C)},
          {"tolerance", p.tolerance}, {"nested_in_A", p.nested_in_A},
          {"nested_in_t", p.nested_in_t}, {"sets", sets}};
}

json report_json(const RunResult& r, bool wall_clock) {
  const auto& tr = r.trajectory;
  const auto& g = *tr.geometry;
  const ClassPath& p = g.path();
  json j;
  j["schema"] = kReportSchema;
  j["scenario"] = r.config.id;
  j["config"] = format_config(r.config);

  json cp;
  cp["model"] = p.model().spec();
  std::vector<std::string> c0, cinf;
  for (const auto& x : p.omega0().coords) c0.push_back(x.str());
  for (const auto& x : p.omega_inf()) cinf.push_back(x.str());
  cp["omega0"] = c0;
  cp["omega_inf"] = cinf;
  cp["T"] = value(p.singular_time());
  cp["k"] = p.collapse_exponent();
  cp["regime"] = describe(p.regime());
  cp["limit_wall"] = to_string(p.regime().wall);
  cp["volume_leading_coefficient"] = value(p.leading_coefficient());
  j["class_path"] = cp;

  json run;
  run["backend"] = g.describe();
  run["termination"] = to_string(tr.termination);
  run["singularity_detected"] = tr.singularity_detected;
  run["stop_time"] = value(tr.stop_time);
  run["final_time"] = value(tr.final_time());
  run["snapshots"] = tr.snapshots.size();
  run["accepted_steps"] = tr.accepted_steps;
  run["rejected_steps"] = tr.rejected_steps;
  run["newton_iterations"] = tr.newton_iterations;
  run["factorizations"] = tr.factorizations;
  run["positivity_violations"] = tr.positivity_violations;
  run["amgm_violations"] = tr.amgm_violations;
  run["refinements"] = r.refinements_run;
  j["run"] = run;

  json reps = json::array();
  for (const auto& x : r.suites.reports) reps.push_back(to_json(x));
  j["inequalities"] = reps;
  j["fits"] = r.suites.fit ? json::array({to_json(*r.suites.fit)}) : json::array();
  j["limit_profile"] = r.suites.profile ? to_json(*r.suites.profile) : json(nullptr);
  j["suite_errors"] = r.suites.errors;

  json gold = json::array();
  for (const auto& x : r.golden)
    gold.push_back({{"name", x.name}, {"expected", x.expected}, {"actual", x.actual}, {"pass", x.pass}});
  j["golden"] = gold;
  j["failures"] = r.failures;
  j["exit_code"] = r.exit_code;
  if (wall_clock) j["wall_clock_seconds"] = r.wall_seconds;
  return j;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& row : tr.rows) {
    const auto v = csv_values(row);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << num(v[i]);
    os << "\n";
  }
  return os.str();
}

std::string plot_data(const RunResult& r) {
  std::ostringstream os;
  const auto& tr = r.trajectory;
  os << "# scenario " << r.config.id << "\n";
  auto block = [&](const std::string& name, const std::vector<double>& t, const std::vector<double>& y) {
    os << "\n\n# " << name << "\n# t value\n";
    for (std::size_t i = 0; i < t.size(); ++i) os << num(t[i]) << " " << num(y[i]) << "\n";
  };
  const auto& cols = csv_columns();
  std::vector<double> t;
  for (const auto& row : tr.rows) t.push_back(row.t);
  for (std::size_t c = 1; c < cols.size(); ++c) {
    std::vector<double> y;
    for (const auto& row : tr.rows) y.push_back(csv_values(row)[c]);
    block(cols[c], t, y);
  }
  // Measured quantities against -log(T - t) (or t when T is infinite).
  std::vector<double> ref;
  const double T = tr.geometry->singular_time();
  for (double x : t) ref.push_back(std::isfinite(T) ? -std::log(T - x) : x);
  block(std::isfinite(T) ? "minus_log_T_minus_t" : "t_reference", t, ref);
  for (const auto& rep : r.suites.reports) block("margin:" + rep.name, rep.t, rep.margin);
  return os.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  std::size_t n = rows.empty() ? 0 : rows.front().coords.size();
  for (std::size_t i = 0; i < n; ++i) os << "c" << i << ",";
  os << "in_cone,T,k,regime,inf_u\n";
  for (const auto& r : rows) {
    for (const auto& c : r.coords) os << c << ",";
    os << (r.in_cone ? 1 : 0) << ",";
    if (r.in_cone) os << num(r.T) << "," << r.k << "," << r.regime << ",";
    else os << ",,,";
    if (r.inf_u) os << num(*r.inf_u);
    os << "\n";
  }
  return os.str();
}

void write_run_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "trajectory.csv", trajectory_csv(r.trajectory));
  write_file(dir / "report.json", report_json(r).dump(2) + "\n");
  write_file(dir / "plot.gp-data", plot_data(r));
}

}  // namespace krf
