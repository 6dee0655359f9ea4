#include "krf/scenario.hpp"

#include "krf/errors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace krf {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_number(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("key '" + key + "': trailing characters in '" + v + "'");
  return d;
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_number(key, v);
  if (d != std::floor(d) || std::abs(d) > 2e9) throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s = {"essential", "volume_form", "lower_bound", "schwarz",
                                             "collapsing", "fit",         "limit_profile", "curvature"};
  return s;
}

const std::vector<std::string>& known_refinements() {
  static const std::vector<std::string> s = {"dt", "N", "eps", "R"};
  return s;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"id", [](auto& c, auto&, auto& v) { c.id = v; }},
      {"model", [](auto& c, auto&, auto& v) { c.model = v; }},
      {"omega0", [](auto& c, auto&, auto& v) { c.omega0 = split_list(v); }},
      {"grid.nodes", [](auto& c, auto& k, auto& v) { c.backend.line.nodes = to_int(k, v); }},
      {"grid.half_width", [](auto& c, auto& k, auto& v) { c.backend.line.half_width = to_number(k, v); }},
      {"grid.spacing", [](auto& c, auto&, auto& v) { c.backend.line.spacing = parse_spacing(v); }},
      {"grid.core_scale", [](auto& c, auto& k, auto& v) { c.backend.line.core_scale = to_number(k, v); }},
      {"grid.tail_weight", [](auto& c, auto& k, auto& v) { c.backend.line.tail_weight = to_number(k, v); }},
      {"torus.nodes", [](auto& c, auto& k, auto& v) { c.backend.torus_nodes = to_int(k, v); }},
      {"torus.period", [](auto& c, auto& k, auto& v) { c.backend.torus_period = to_number(k, v); }},
      {"torus.ripple", [](auto& c, auto& k, auto& v) { c.backend.torus_ripple = to_number(k, v); }},
      {"backend.calibration_time", [](auto& c, auto& k, auto& v) { c.backend.calibration_time = to_number(k, v); }},
      {"backend.positivity_floor", [](auto& c, auto& k, auto& v) { c.backend.positivity_floor = to_number(k, v); }},
      {"backend.exec", [](auto& c, auto&, auto& v) { c.backend.exec = kernels::parse_exec(v); }},
      {"controller.dt_init", [](auto& c, auto& k, auto& v) { c.controller.dt_init = to_number(k, v); }},
      {"controller.dt_min", [](auto& c, auto& k, auto& v) { c.controller.dt_min = to_number(k, v); }},
      {"controller.dt_max", [](auto& c, auto& k, auto& v) { c.controller.dt_max = to_number(k, v); }},
      {"controller.newton_tol", [](auto& c, auto& k, auto& v) { c.controller.newton_tol = to_number(k, v); }},
      {"controller.max_newton_iters", [](auto& c, auto& k, auto& v) { c.controller.max_newton_iters = to_int(k, v); }},
      {"controller.polish_iters", [](auto& c, auto& k, auto& v) { c.controller.polish_iters = to_int(k, v); }},
      {"controller.step_tol", [](auto& c, auto& k, auto& v) { c.controller.step_tol = to_number(k, v); }},
      {"controller.extrapolate", [](auto& c, auto& k, auto& v) { c.controller.extrapolate = to_bool(k, v); }},
      {"controller.stop_offset", [](auto& c, auto& k, auto& v) { c.controller.stop_offset = to_number(k, v); }},
      {"controller.t_max", [](auto& c, auto& k, auto& v) { c.controller.t_max = to_number(k, v); }},
      {"controller.snapshot_spacing", [](auto& c, auto& k, auto& v) { c.controller.snapshot_spacing = to_number(k, v); }},
      {"controller.early_snapshots", [](auto& c, auto& k, auto& v) { c.controller.early_snapshots = to_int(k, v); }},
      {"controller.substeps_per_halving",
       [](auto& c, auto& k, auto& v) { c.controller.substeps_per_halving = to_int(k, v); }},
      {"controller.max_steps", [](auto& c, auto& k, auto& v) { c.controller.max_steps = to_int(k, v); }},
      {"controller.extra_times",
       [](auto& c, auto& k, auto& v) {
         c.controller.extra_times.clear();
         for (const auto& x : split_list(v)) c.controller.extra_times.push_back(to_number(k, x));
       }},
      {"diagnostics.suites",
       [](auto& c, auto&, auto& v) {
         c.suites = split_list(v);
         for (const auto& s : c.suites)
           if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end())
             throw ConfigError("unknown diagnostics suite '" + s + "'");
       }},
      {"diagnostics.lower_bound",
       [](auto& c, auto&, auto& v) {
         c.lower_bound_modes.clear();
         for (const auto& s : split_list(v)) c.lower_bound_modes.push_back(parse_lower_bound_mode(s));
       }},
      {"diagnostics.refinements",
       [](auto& c, auto&, auto& v) {
         c.refinements = split_list(v);
         for (const auto& s : c.refinements)
           if (std::find(known_refinements().begin(), known_refinements().end(), s) == known_refinements().end())
             throw ConfigError("unknown refinement '" + s + "'");
       }},
      {"output.dir", [](auto& c, auto&, auto& v) { c.out_dir = v; }},
      {"expect.k", [](auto& c, auto& k, auto& v) { c.expect_k = to_int(k, v); }},
      {"expect.regime", [](auto& c, auto&, auto& v) { c.expect_regime = v; }},
      {"expect.T", [](auto& c, auto& k, auto& v) { c.expect_T = to_number(k, v); }},
      {"expect.k_hat_tolerance", [](auto& c, auto& k, auto& v) { c.expect_k_hat_tolerance = to_number(k, v); }},
  };
  return m;
}

void validate(const ScenarioConfig& c) {
  if (c.model.empty()) throw ConfigError("missing key 'model'");
  if (c.omega0.empty()) throw ConfigError("missing key 'omega0'");
  const KahlerClass k = c.kahler_class();
  if (k.coords.size() != k.model.coordinate_count())
    throw ConfigError("omega0 needs " + std::to_string(k.model.coordinate_count()) + " coordinates for " + c.model);
  if (!is_kahler(k)) throw ConfigError("omega0 = (" + join(c.omega0) + ") is not a Kähler class on " + c.model);
  if (c.backend.line.nodes < 8 || c.backend.torus_nodes < 8) throw ConfigError("grids need at least 8 nodes");
  if (!(c.controller.dt_min > 0) || !(c.controller.dt_max >= c.controller.dt_min) || !(c.controller.step_tol > 0) ||
      !(c.controller.newton_tol > 0))
    throw ConfigError("controller tolerances and step bounds must be positive");
}

}  // namespace

KahlerClass ScenarioConfig::kahler_class() const {
  KahlerClass k{ModelGeometry::parse(model), {}};
  for (const auto& s : omega0) {
    try {
      k.coords.push_back(parse_rational(s));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("omega0: ") + e.what());
    }
  }
  return k;
}

bool ScenarioConfig::has_suite(const std::string& s) const {
  return std::find(suites.begin(), suites.end(), s) != suites.end();
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig c;
  std::string section;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (seen[key]++) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      it->second(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ScenarioConfig& c) {
  std::ostringstream os;
  const auto& b = c.backend;
  const auto& k = c.controller;
  os << "id = " << c.id << "\n"
     << "model = " << c.model << "\n"
     << "omega0 = " << join(c.omega0) << "\n\n"
     << "[grid]\nnodes = " << b.line.nodes << "\nhalf_width = " << num(b.line.half_width)
     << "\nspacing = " << to_string(b.line.spacing) << "\ncore_scale = " << num(b.line.core_scale)
     << "\ntail_weight = " << num(b.line.tail_weight) << "\n\n"
     << "[torus]\nnodes = " << b.torus_nodes << "\nperiod = " << num(b.torus_period)
     << "\nripple = " << num(b.torus_ripple) << "\n\n"
     << "[backend]\ncalibration_time = " << num(b.calibration_time) << "\npositivity_floor = "
     << num(b.positivity_floor) << "\nexec = " << (b.exec == kernels::Exec::Parallel ? "parallel" : "serial")
     << "\n\n"
     << "[controller]\ndt_init = " << num(k.dt_init) << "\ndt_min = " << num(k.dt_min) << "\ndt_max = "
     << num(k.dt_max) << "\nnewton_tol = " << num(k.newton_tol) << "\nmax_newton_iters = " << k.max_newton_iters
     << "\npolish_iters = " << k.polish_iters << "\nstep_tol = " << num(k.step_tol)
     << "\nextrapolate = " << (k.extrapolate ? "true" : "false") << "\nstop_offset = " << num(k.stop_offset)
     << "\nt_max = " << num(k.t_max) << "\nsnapshot_spacing = " << num(k.snapshot_spacing)
     << "\nearly_snapshots = " << k.early_snapshots << "\nsubsteps_per_halving = " << k.substeps_per_halving
     << "\nmax_steps = " << k.max_steps << "\n";
  if (!k.extra_times.empty()) {
    std::vector<std::string> t;
    for (double x : k.extra_times) t.push_back(num(x));
    os << "extra_times = " << join(t) << "\n";
  }
  std::vector<std::string> modes;
  for (auto m : c.lower_bound_modes) modes.push_back(to_string(m));
  os << "\n[diagnostics]\n";
  if (!c.suites.empty()) os << "suites = " << join(c.suites) << "\n";
  os << "lower_bound = " << join(modes) << "\n";
  if (!c.refinements.empty()) os << "refinements = " << join(c.refinements) << "\n";
  os << "\n[output]\ndir = " << c.out_dir << "\n";
  if (c.expect_k || c.expect_regime || c.expect_T) {
    os << "\n[expect]\n";
    if (c.expect_k) os << "k = " << *c.expect_k << "\n";
    if (c.expect_regime) os << "regime = " << *c.expect_regime << "\n";
    if (c.expect_T) os << "T = " << num(*c.expect_T) << "\n";
    os << "k_hat_tolerance = " << num(c.expect_k_hat_tolerance) << "\n";
  }
  return os.str();
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> p = {
      {"homog-cp2-fano", "FiniteCollapsing(2)",
       "CP^2 with omega0 = -K_X: total collapse at T = ln 2, spatially constant oracle",
       "id = homog-cp2-fano\nmodel = projective:2\nomega0 = 3\n"
       "[controller]\nstep_tol = 1e-8\nextra_times = 0.59314718055994529\n"
       "[diagnostics]\nsuites = essential, volume_form, lower_bound, schwarz, collapsing, fit, limit_profile, "
       "curvature\nrefinements = dt, eps\n"
       "[expect]\nk = 2\nregime = FiniteCollapsing(2)\nT = 0.69314718055994531\nk_hat_tolerance = 0.15\n"},
      {"f1-contraction", "FiniteNonCollapsing",
       "Hirzebruch F_1, omega0 = (1, 6/5): the exceptional section contracts at T = ln 1.2",
       "id = f1-contraction\nmodel = hirzebruch:1\nomega0 = 1, 6/5\n"
       "[grid]\nnodes = 512\nhalf_width = 20\n"
       "[controller]\nstep_tol = 1e-6\n"
       "[diagnostics]\nsuites = essential, volume_form, lower_bound, schwarz, limit_profile, curvature\n"
       "lower_bound = semi-ample, divisor, noncollapsing\nrefinements = dt, N, eps, R\n"
       "[expect]\nregime = FiniteNonCollapsing\nT = 0.18232155679395462\n"},
      {"f1-fiber-collapse", "FiniteCollapsing(1)",
       "Hirzebruch F_1, omega0 = (2, 5): the P^1 fibers collapse at T = ln 2",
       "id = f1-fiber-collapse\nmodel = hirzebruch:1\nomega0 = 2, 5\n"
       "[grid]\nnodes = 512\nhalf_width = 20\n"
       "[controller]\nstep_tol = 1e-6\nstop_offset = 1e-3\n"
       "[diagnostics]\nsuites = essential, volume_form, lower_bound, schwarz, collapsing, fit, limit_profile, "
       "curvature\nrefinements = dt, N, eps, R\n"
       "[expect]\nk = 1\nregime = FiniteCollapsing(1)\nT = 0.69314718055994531\nk_hat_tolerance = 0.15\n"},
      {"fano-total-collapse", "FiniteCollapsing(2)",
       "P^1 x P^1 with omega0 = -K_X: Fano total collapse at T = ln 2, spatially constant oracle",
       "id = fano-total-collapse\nmodel = product:1@1,1@1\nomega0 = 1, 1\n"
       "[controller]\nstep_tol = 1e-8\n"
       "[diagnostics]\nsuites = essential, volume_form, lower_bound, schwarz, collapsing, fit, limit_profile, "
       "curvature\nrefinements = dt, eps\n"
       "[expect]\nk = 2\nregime = FiniteCollapsing(2)\nT = 0.69314718055994531\nk_hat_tolerance = 0.15\n"},
      {"torus-infinite-collapse", "InfiniteCollapsing(2)",
       "Flat 2-torus product: u = -2(t - 1 + e^{-t}), infinite-time collapse with k = 2",
       "id = torus-infinite-collapse\nmodel = torus:2\nomega0 = 1, 1\n"
       "[torus]\nnodes = 256\n"
       "[controller]\nstep_tol = 5e-9\nt_max = 20\n"
       "[diagnostics]\nsuites = essential, volume_form, schwarz, collapsing, fit, curvature\nrefinements = dt, N\n"
       "[expect]\nk = 2\nregime = InfiniteCollapsing(2)\nk_hat_tolerance = 0.05\n"},
      {"product-ke-fixed", "InfiniteNonCollapsing",
       "Product of two hyperbolic curves with omega0 = K_X: the flow is stationary at u = 0",
       "id = product-ke-fixed\nmodel = product:-1@1,-1@1\nomega0 = 1, 1\n"
       "[controller]\nt_max = 20\n"
       "[diagnostics]\nsuites = essential, volume_form, lower_bound, schwarz, curvature\n"
       "lower_bound = semi-ample, noncollapsing\nrefinements = dt\n"
       "[expect]\nk = 0\nregime = InfiniteNonCollapsing\n"},
      {"product-hyp-x-elliptic", "InfiniteCollapsing(1)",
       "Hyperbolic curve times elliptic curve: the flat factor collapses, u ~ -t",
       "id = product-hyp-x-elliptic\nmodel = product:-1@1,0@1\nomega0 = 1, 1\n"
       "[controller]\nstep_tol = 1e-8\nt_max = 20\n"
       "[diagnostics]\nsuites = essential, volume_form, schwarz, collapsing, fit, curvature\nrefinements = dt\n"
       "[expect]\nk = 1\nregime = InfiniteCollapsing(1)\nk_hat_tolerance = 0.05\n"},
  };
  return p;
}

ScenarioConfig preset_config(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return parse_config(p.text);
  throw ConfigError("unknown preset '" + name + "'");
}

std::optional<ScenarioConfig> refined_config(const ScenarioConfig& c, const std::string& label) {
  ScenarioConfig r = c;
  const auto kind = default_backend(ModelGeometry::parse(c.model));
  if (label == "dt") {
    r.controller.dt_init *= 0.5;
    r.controller.dt_max *= 0.5;
    r.controller.step_tol *= 0.25;
  } else if (label == "N") {
    if (kind == BackendKind::Calabi) r.backend.line.nodes *= 2;
    else if (kind == BackendKind::Torus) r.backend.torus_nodes *= 2;
    else return std::nullopt;
  } else if (label == "eps") {
    if (!class_path(c.kahler_class()).finite_time()) return std::nullopt;
    r.controller.stop_offset *= 0.5;
  } else if (label == "R") {
    if (kind != BackendKind::Calabi) return std::nullopt;
    r.backend.line.half_width *= 2.0;
  } else {
    throw ConfigError("unknown refinement '" + label + "'");
  }
  return r;
}

bool expects_divergence(const std::string& n) { return n == "utu_diverges" || n == "collapse_composite_diverges"; }

bool measured_only(const std::string& n) {
  return n == "osc_utu_measured" || n == "mean_deviation_measured" || n == "ricci_lower" || n == "type_one" ||
         n == "U_rate";
}

SuiteResult evaluate_suites(const Trajectory& tr, const ScenarioConfig& c) {
  SuiteResult out;
  const Regime& regime = tr.geometry->path().regime();
  const bool finite = tr.geometry->path().finite_time();
  const bool coll = regime.kind == RegimeKind::FiniteCollapsing || regime.kind == RegimeKind::InfiniteCollapsing;
  std::vector<std::string> suites = c.suites;
  if (suites.empty()) {
    suites = {"essential", "volume_form", "schwarz", "curvature"};
    if (regime.semi_ample_limit || regime.kind == RegimeKind::InfiniteNonCollapsing) suites.push_back("lower_bound");
    if (coll) suites.insert(suites.end(), {"collapsing", "fit"});
    if (finite) suites.push_back("limit_profile");
  }
  auto guard = [&](const std::string& name, const std::function<void()>& f) {
    try {
      f();
    } catch (const DiagnosticError& e) {
      out.errors.push_back(name + ": " + e.what());
    }
  };
  auto append = [&](std::vector<InequalityReport> v) {
    for (auto& r : v) out.reports.push_back(std::move(r));
  };
  for (const auto& s : suites) {
    if (s == "essential") guard(s, [&] { out.reports.push_back(essential_decreasing_report(tr)); });
    if (s == "volume_form") guard(s, [&] { out.reports.push_back(volume_form_decreasing_report(tr)); });
    if (s == "lower_bound")
      for (auto m : c.lower_bound_modes) guard(s, [&] { out.reports.push_back(lower_bound_report(tr, m)); });
    if (s == "schwarz") guard(s, [&] { out.reports.push_back(schwarz_report(tr)); });
    if (s == "collapsing") guard(s, [&] { append(collapsing_report(tr)); });
    if (s == "fit") guard(s, [&] { out.fit = fit_exponent(tr); });
    if (s == "limit_profile") guard(s, [&] { out.profile = limit_profile(tr); });
    if (s == "curvature") guard(s, [&] { append(curvature_probe_report(tr)); });
  }
  return out;
}

namespace {

std::vector<std::string> collect_failures(const RunResult& r) {
  std::vector<std::string> f;
  const bool refined = !r.refinements_run.empty();
  for (const auto& e : r.suites.errors) f.push_back("suite error: " + e);
  for (const auto& rep : r.suites.reports) {
    if (measured_only(rep.name)) continue;
    if (expects_divergence(rep.name)) {
      if (rep.verdict != Verdict::Diverges) f.push_back(rep.name + ": divergence not certified");
      continue;
    }
    if (!rep.holds) f.push_back(rep.name + ": pointwise check failed");
    if (!std::isfinite(rep.C)) f.push_back(rep.name + ": constant not finite");
    else if (refined && rep.verdict != Verdict::BoundedStable) f.push_back(rep.name + ": " + to_string(rep.verdict));
  }
  if (r.suites.fit && r.config.expect_k) {
    const auto& fit = *r.suites.fit;
    if (!(fit.relative_error() <= r.config.expect_k_hat_tolerance))
      f.push_back("fit_exponent: k_hat = " + num(fit.k_hat) + " vs k = " + std::to_string(fit.k_reference) +
                  " outside tolerance " + num(r.config.expect_k_hat_tolerance));
  }
  if (r.suites.profile && !(r.suites.profile->nested_in_t && r.suites.profile->nested_in_A))
    f.push_back("limit_profile: sublevel sets not nested");
  for (const auto& g : r.golden)
    if (!g.pass) f.push_back("golden " + g.name + ": expected " + g.expected + ", got " + g.actual);
  if (r.trajectory.positivity_violations > 0)
    f.push_back("positivity violated on " + std::to_string(r.trajectory.positivity_violations) + " accepted steps");
  if (r.trajectory.amgm_violations > 0)
    f.push_back("AM-GM trace property violated at " + std::to_string(r.trajectory.amgm_violations) + " nodes");
  return f;
}

/// If inf u diverges under refinement, the Ricci lower bound and the Type-I bound cannot both be stable.
void check_curvature_implication(RunResult& r, const std::vector<std::pair<std::string, SuiteResult>>& refined) {
  auto find = [](const std::vector<InequalityReport>& v, const std::string& n) -> const InequalityReport* {
    for (const auto& x : v)
      if (x.name == n) return &x;
    return nullptr;
  };
  const auto* base = find(r.suites.reports, "ricci_lower");
  if (!base) return;
  const double inf_u = base->constant("inf_u");
  bool diverging = false;
  for (const auto& [label, s] : refined) {
    const auto* x = find(s.reports, "ricci_lower");
    if (x && x->constant("inf_u") > inf_u && relative_drift(inf_u, x->constant("inf_u")) > base->drift_tolerance)
      diverging = true;
  }
  if (!diverging) return;
  const auto* t1 = find(r.suites.reports, "type_one");
  if (base->verdict == Verdict::BoundedStable && t1 && t1->verdict == Verdict::BoundedStable)
    r.failures.push_back("curvature: inf u diverges yet Ricci lower bound and Type-I bound are both stable");
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  validate(c);
  RunResult r;
  r.config = c;
  const ClassPath path = class_path(c.kahler_class());
  r.trajectory = evolve(make_geometry(path, c.backend), c.controller);
  r.suites = evaluate_suites(r.trajectory, c);

  std::vector<std::pair<std::string, SuiteResult>> refined;
  for (const auto& label : c.refinements) {
    auto rc = refined_config(c, label);
    if (!rc) continue;
    try {
      const Trajectory t = evolve(make_geometry(path, rc->backend), rc->controller);
      refined.emplace_back(label, evaluate_suites(t, *rc));
      r.refinements_run.push_back(label);
    } catch (const std::exception& e) {
      r.suites.errors.push_back("refinement " + label + ": " + e.what());
    }
  }
  std::vector<std::pair<std::string, std::vector<InequalityReport>>> reps;
  for (const auto& [label, s] : refined) reps.emplace_back(label, s.reports);
  apply_refinements(r.suites.reports, reps);

  if (c.expect_k)
    r.golden.push_back({"k", std::to_string(*c.expect_k), std::to_string(path.collapse_exponent()),
                        *c.expect_k == path.collapse_exponent()});
  if (c.expect_regime) {
    const std::string got = describe(path.regime());
    r.golden.push_back({"regime", *c.expect_regime, got, got == *c.expect_regime});
  }
  if (c.expect_T) {
    const double T = path.singular_time();
    r.golden.push_back({"T", num(*c.expect_T), num(T), std::abs(T - *c.expect_T) <= 1e-12 * std::max(1.0, T)});
  }

  r.failures = collect_failures(r);
  check_curvature_implication(r, refined);
  const auto& tr = r.trajectory;
  if (tr.termination != TerminationReason::ReachedStop && !tr.singularity_detected) r.exit_code = 3;
  else r.exit_code = r.failures.empty() ? 0 : 2;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<std::vector<std::string>> parse_sweep_grid(const std::string& spec, std::size_t coordinates) {
  const auto axes = split_list(spec, ';');
  if (axes.size() != coordinates)
    throw ConfigError("sweep grid has " + std::to_string(axes.size()) + " axes, model needs " +
                      std::to_string(coordinates));
  std::vector<std::vector<std::string>> out;
  for (const auto& axis : axes) {
    std::vector<std::string> vals;
    const auto parts = split_list(axis, ':');
    try {
      if (parts.size() == 3) {
        const Rational a = parse_rational(parts[0]), b = parse_rational(parts[1]);
        const int n = to_int("grid", parts[2]);
        if (n < 1) throw ConfigError("sweep axis needs at least one point");
        for (int i = 0; i < n; ++i) {
          const Rational v = n == 1 ? a : a + (b - a) * Rational(i) / Rational(n - 1);
          vals.push_back(v.str());
        }
      } else if (parts.size() == 1) {
        for (const auto& v : split_list(axis)) vals.push_back(parse_rational(v).str());
      } else {
        throw ConfigError("sweep axis must be 'a:b:n' or a comma list, got '" + axis + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("sweep grid: ") + e.what());
    }
    out.push_back(std::move(vals));
  }
  return out;
}

std::vector<SweepRow> sweep(const std::string& model_spec, const std::string& grid_spec, bool run_flow,
                            const ScenarioConfig& base) {
  const ModelGeometry model = ModelGeometry::parse(model_spec);
  const auto axes = parse_sweep_grid(grid_spec, model.coordinate_count());
  std::vector<std::vector<std::string>> points{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<std::string>> next;
    for (const auto& p : points)
      for (const auto& v : axis) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  std::vector<SweepRow> rows(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < points.size(); ++i) {
    SweepRow& row = rows[i];
    row.coords = points[i];
    KahlerClass k{model, {}};
    for (const auto& s : points[i]) k.coords.push_back(parse_rational(s));
    row.in_cone = is_kahler(k);
    if (!row.in_cone) continue;
    const ClassPath p = class_path(k);
    row.T = p.singular_time();
    row.k = p.collapse_exponent();
    row.regime = describe(p.regime());
    if (run_flow) {
      ScenarioConfig c = base;
      c.model = model_spec;
      c.omega0 = points[i];
      try {
        const Trajectory tr = evolve(make_geometry(p, c.backend), c.controller);
        double m = std::numeric_limits<double>::infinity();
        for (const auto& r : tr.rows) m = std::min(m, r.min_u);
        row.inf_u = m;
      } catch (const std::exception&) {
        row.inf_u.reset();
      }
    }
  }
  return rows;
}

}  // namespace krf
