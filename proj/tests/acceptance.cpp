#include "krf/estimates.hpp"
#include "krf/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace krf;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> failures;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    failures.push_back(what);
  }

  std::string line() const {
    std::string s;
    for (const auto& f : failures) s += f + "; ";
    return s + detail.str();
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::shared_ptr<const ReducedGeometry> geometry_of(const ScenarioConfig& c) {
  return make_geometry(class_path(c.kahler_class()), c.backend);
}

Trajectory evolve_config(const ScenarioConfig& c) { return evolve(geometry_of(c), c.controller); }

const InequalityReport* find_report(const SuiteResult& s, const std::string& name) {
  for (const auto& r : s.reports)
    if (r.name == name) return &r;
  return nullptr;
}

double max_drift(const InequalityReport& r) {
  double d = 0;
  for (const auto& x : r.refinements) d = std::max(d, x.drift);
  return d;
}

void class_path_exactness(Outcome& o) {
  const auto t0 = Clock::now();
  const ClassPath fc = class_path(KahlerClass{ModelGeometry::hirzebruch(1), {Rational(2), Rational(5)}});
  const ClassPath ct = class_path(KahlerClass{ModelGeometry::hirzebruch(1), {Rational(1), Rational(6, 5)}});
  const double secs = seconds_since(t0);
  const double e1 = std::abs(fc.singular_time() - std::log(2.0));
  const double e2 = std::abs(ct.singular_time() - std::log(1.2));
  const double e3 = std::abs(ct.volume_at_singular_time() - 0.25);
  o.check(e1 <= 1e-12, "fiber-collapse T error " + std::to_string(e1));
  o.check(fc.collapse_exponent() == 1, "fiber-collapse k != 1");
  o.check(fc.regime().kind == RegimeKind::FiniteCollapsing && fc.regime().wall == LimitWall::Fiber,
          "fiber-collapse regime " + describe(fc.regime()));
  o.check(e2 <= 1e-12, "contraction T error " + std::to_string(e2));
  o.check(ct.regime().kind == RegimeKind::FiniteNonCollapsing, "contraction regime " + describe(ct.regime()));
  o.check(e3 <= 1e-12, "V(T) error " + std::to_string(e3));
  o.check(secs < 0.1, "runtime " + std::to_string(secs) + " s");
  o.detail << "T errors " << e1 << ", " << e2 << ", V(T) error " << e3 << ", " << secs << " s";
}

void homogeneous_oracle(Outcome& o) {
  const auto t0 = Clock::now();
  const ScenarioConfig c = preset_config("homog-cp2-fano");
  const auto g = geometry_of(c);
  const ClassPath& p = g->path();
  const double t1 = p.singular_time() - 0.1;
  const Trajectory tr = evolve(g, c.controller);
  const FlowState* s = nullptr;
  for (const auto& x : tr.snapshots)
    if (std::abs(x.t - t1) < 1e-12) s = &x;
  const double secs = seconds_since(t0);
  o.check(s != nullptr, "no snapshot at T - 0.1");
  if (!s) return;
  const double u = closed_form_homogeneous(p, t1), ut = homogeneous_forcing(p, t1) - u;
  const double utt = homogeneous_forcing_rate(p, t1) - ut;
  double eu = 0, eut = 0, eutt = 0;
  const Field pu = g->to_points(s->u), put = g->to_points(s->ut), putt = g->to_points(compute_utt(*s, *g));
  for (std::size_t i = 0; i < pu.size(); ++i) {
    eu = std::max(eu, std::abs(pu[i] - u));
    eut = std::max(eut, std::abs(put[i] - ut));
    eutt = std::max(eutt, std::abs(putt[i] - utt));
  }
  o.check(eu <= 1e-8, "u error " + std::to_string(eu));
  o.check(eut <= 1e-6, "u_t error " + std::to_string(eut));
  o.check(eutt <= 1e-6, "u_tt error " + std::to_string(eutt));
  o.check(secs < 1.0, "runtime " + std::to_string(secs) + " s");
  o.detail << "errors u " << eu << ", u_t " << eut << ", u_tt " << eutt << ", " << secs << " s";
}

void torus_closed_form(Outcome& o) {
  const auto t0 = Clock::now();
  ScenarioConfig c = preset_config("torus-infinite-collapse");
  c.backend.torus_nodes = 256;
  c.controller.t_max = 20;
  const Trajectory tr = evolve_config(c);
  const AsymptoticFit f = fit_exponent(tr);
  const double secs = seconds_since(t0);
  double err = 0;
  for (const auto& r : tr.rows) {
    const double exact = -2 * (r.t - 1 + std::exp(-r.t));
    err = std::max({err, std::abs(r.max_u - exact), std::abs(r.min_u - exact)});
  }
  o.check(err <= 1e-8, "closed-form error " + std::to_string(err));
  o.check(f.relative_error() <= 0.05, "k_hat " + std::to_string(f.k_hat));
  o.check(secs < 10, "runtime " + std::to_string(secs) + " s");
  o.detail << "max |u - closed form| " << err << ", k_hat " << f.k_hat << ", " << secs << " s";
}

void hyperbolic_elliptic(Outcome& o) {
  const ScenarioConfig c = preset_config("product-hyp-x-elliptic");
  const Trajectory tr = evolve_config(c);
  const AsymptoticFit f = fit_exponent(tr);
  std::vector<double> t, m;
  for (const auto& r : tr.rows)
    if (r.t >= tr.final_time() / 2) t.push_back(r.t), m.push_back(r.mean_u);
  const double slope = fit_line(t, m)[1];
  o.check(f.relative_error() <= 0.05, "k_hat " + std::to_string(f.k_hat));
  o.check(std::abs(slope + 1) <= 0.05, "mean u slope " + std::to_string(slope));
  o.detail << "k_hat " << f.k_hat << ", mean u slope " << slope;
}

void contraction_lower_bound(Outcome& o) {
  const auto t0 = Clock::now();
  const ScenarioConfig c = preset_config("f1-contraction");
  const RunResult r = run_scenario(c);
  const double secs = seconds_since(t0);
  std::vector<std::string> want{"dt", "N", "eps", "R"};
  for (const auto& w : want)
    o.check(std::find(r.refinements_run.begin(), r.refinements_run.end(), w) != r.refinements_run.end(),
            "refinement " + w + " not run");
  double worst = 0;
  double inf_u = HUGE_VAL;
  for (const auto& row : r.trajectory.rows) inf_u = std::min(inf_u, row.min_u);
  for (const auto& rep : r.suites.reports) {
    if (rep.name.rfind("lower_bound_", 0) != 0) continue;
    o.check(std::isfinite(rep.C) && rep.holds, rep.name + " not bounded");
    o.check(rep.refinements.size() == want.size(), rep.name + " missing refinements");
    worst = std::max(worst, max_drift(rep));
  }
  const InequalityReport* sa = find_report(r.suites, "lower_bound_semi-ample");
  o.check(sa != nullptr, "no semi-ample lower bound report");
  if (sa) o.check(sa->verdict == Verdict::BoundedStable, "semi-ample verdict " + to_string(sa->verdict));
  o.check(std::isfinite(inf_u), "inf u not finite");
  o.check(worst < 0.05, "lower-bound drift " + std::to_string(worst));
  o.check(secs < 120, "runtime " + std::to_string(secs) + " s");
  o.detail << "inf u " << inf_u << ", worst lower-bound drift " << worst << ", " << secs << " s";
}

void fiber_collapse(Outcome& o) {
  ScenarioConfig c = preset_config("f1-fiber-collapse");
  c.suites = {"collapsing", "fit"};
  const RunResult r = run_scenario(c);
  for (const char* name : {"utu_diverges", "collapse_composite_diverges"}) {
    const InequalityReport* d = find_report(r.suites, name);
    o.check(d && d->verdict == Verdict::Diverges, std::string(name) + " not Diverges");
  }
  const InequalityReport* lb = find_report(r.suites, "log_bounds");
  o.check(lb != nullptr, "no log_bounds report");
  if (lb) {
    o.check(lb->holds, "log bounds violated");
    o.check(lb->verdict == Verdict::BoundedStable, "log_bounds verdict " + to_string(lb->verdict));
  }
  o.check(r.suites.fit.has_value(), "no fit");
  if (!r.suites.fit) return;
  const AsymptoticFit& f = *r.suites.fit;
  o.check(f.relative_error() <= 0.15, "k_hat " + std::to_string(f.k_hat) + " outside 15% of 1");
  o.detail << "k_hat " << f.k_hat << " (mean " << f.k_hat_mean << ", volume " << f.k_hat_volume << ")";
  if (lb) o.detail << ", log_bounds drift " << max_drift(*lb);
}

void suite_universality(Outcome& o) {
  double worst = 0;
  int amgm = 0;
  for (const auto& p : presets()) {
    ScenarioConfig c = preset_config(p.name);
    c.suites = {"essential", "volume_form"};
    c.refinements = {"dt"};
    const RunResult r = run_scenario(c);
    amgm += r.trajectory.amgm_violations;
    for (const char* name : {"essential_decreasing", "volume_form_decreasing"}) {
      const InequalityReport* rep = find_report(r.suites, name);
      o.check(rep != nullptr, p.name + ": no " + name);
      if (!rep) continue;
      o.check(std::isfinite(rep->C), p.name + ": " + name + " C not finite");
      o.check(!rep->refinements.empty(), p.name + ": " + name + " not refined");
      const double d = max_drift(*rep);
      o.check(d < 0.1, p.name + ": " + name + " drift " + std::to_string(d));
      worst = std::max(worst, d);
    }
  }
  o.check(amgm == 0, "AM-GM violations " + std::to_string(amgm));
  o.detail << presets().size() << " presets, worst dt drift " << worst << ", AM-GM violations " << amgm;
}

void schwarz(Outcome& o) {
  for (const char* name : {"f1-contraction", "f1-fiber-collapse"}) {
    ScenarioConfig c = preset_config(name);
    c.suites = {"schwarz"};
    const RunResult r = run_scenario(c);
    const InequalityReport* s = find_report(r.suites, "schwarz");
    o.check(s != nullptr, std::string(name) + ": no schwarz report");
    if (!s) continue;
    o.check(s->verdict == Verdict::BoundedStable, std::string(name) + ": verdict " + to_string(s->verdict));
    o.check(s->holds, std::string(name) + ": sandwich violated");
    o.detail << name << " C " << s->C << " drift " << max_drift(*s) << "; ";
  }
}

void solver_integrity(Outcome& o) {
  int violations = 0;
  for (const auto& p : presets()) violations += evolve_config(preset_config(p.name)).positivity_violations;
  o.check(violations == 0, "positivity violations " + std::to_string(violations));

  const ScenarioConfig cp2 = preset_config("homog-cp2-fano");
  const auto g = geometry_of(cp2);
  auto error = [&](int steps) {
    FlowState s = initial_state(*g);
    for (int i = 0; i < steps; ++i) s = implicit_euler_step(s, 0.4 / steps, *g, cp2.controller);
    return std::abs(g->to_points(s.u)[0] - closed_form_homogeneous(g->path(), 0.4));
  };
  const double order = std::log2(error(32) / error(64));
  o.check(order >= 0.8 && order <= 1.2, "temporal order " + std::to_string(order));

  const ScenarioConfig ke = preset_config("product-ke-fixed");
  const auto gk = geometry_of(ke);
  FlowState s = initial_state(*gk);
  double drift = 0;
  for (int i = 0; i < 10000; ++i) {
    s = implicit_euler_step(s, 0.01, *gk, ke.controller);
    for (double v : s.u) drift = std::max(drift, std::abs(v));
  }
  o.check(drift <= ke.controller.newton_tol, "KE drift " + std::to_string(drift));
  o.detail << "positivity violations " << violations << ", order " << order << ", KE max |u| " << drift;
}

void volume_consistency(Outcome& o) {
  for (const char* name : {"f1-contraction", "f1-fiber-collapse"}) {
    for (int n : {512, 2048}) {
      ScenarioConfig c = preset_config(name);
      c.backend.line.nodes = n;
      const Trajectory tr = evolve_config(c);
      double err = 0;
      for (const auto& r : tr.rows) err = std::max(err, std::abs(r.volume_quadrature - r.V_cohom) / r.V_cohom);
      const double tol = n == 512 ? 0.01 : 0.0025;
      o.check(err <= tol, std::string(name) + " N=" + std::to_string(n) + " rel error " + std::to_string(err));
      o.detail << name << " N=" << n << " " << err << "; ";
    }
  }
}

const std::vector<std::pair<std::string, std::function<void(Outcome&)>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> list = {
      {"class-path exactness", class_path_exactness},
      {"homogeneous oracle", homogeneous_oracle},
      {"flat torus closed form and exponent", torus_closed_form},
      {"hyperbolic x elliptic exponent", hyperbolic_elliptic},
      {"contraction lower bound stability", contraction_lower_bound},
      {"fiber-collapse divergence and exponent", fiber_collapse},
      {"decreasing-quantity universality", suite_universality},
      {"Schwarz sandwich", schwarz},
      {"solver integrity", solver_integrity},
      {"volume consistency", volume_consistency},
  };
  return list;
}

bool run_criterion(int n) {
  const auto& [title, fn] = criteria()[n - 1];
  Outcome o;
  try {
    fn(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  std::printf("%s criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", n, title.c_str(), o.line().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int count = static_cast<int>(criteria().size());
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > count) {
      std::fprintf(stderr, "usage: %s [criterion 1..%d ...]\n", argv[0], count);
      return 64;
    }
    which.push_back(n);
  }
  if (which.empty())
    for (int n = 1; n <= count; ++n) which.push_back(n);
  bool all = true;
  for (int n : which) all = run_criterion(n) && all;
  return all ? 0 : 1;
}
