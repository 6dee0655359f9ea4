#include "krf/errors.hpp"
#include "krf/estimates.hpp"
#include "krf/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace krf;

namespace {

Trajectory run(ScenarioConfig c) {
  return evolve(make_geometry(class_path(c.kahler_class()), c.backend), c.controller);
}

/// Trajectories are reused across test cases; each preset is evolved once.
const Trajectory& preset_run(const std::string& name) {
  static std::map<std::string, Trajectory> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    ScenarioConfig c = preset_config(name);
    if (name == "torus-infinite-collapse") c.backend.torus_nodes = 32;
    it = cache.emplace(name, run(c)).first;
  }
  return it->second;
}

Trajectory prefix(const Trajectory& tr, std::size_t n) {
  Trajectory p = tr;
  p.snapshots.resize(n);
  p.rows.resize(n);
  return p;
}

}  // namespace

TEST_CASE("Kähler-Einstein product: decreasing-quantity constants vanish") {
  const Trajectory& tr = preset_run("product-ke-fixed");
  CHECK(std::abs(essential_decreasing_report(tr).C) <= 1e-9);
  CHECK(std::abs(volume_form_decreasing_report(tr).C) <= 1e-9);
  const auto lb = lower_bound_report(tr, LowerBoundMode::SemiAmple);
  CHECK(std::abs(lb.C) <= 1e-9);
  CHECK(lb.holds);
}

TEST_CASE("CP2 constants match the closed form at the snapshot times") {
  const Trajectory& tr = preset_run("homog-cp2-fano");
  const ClassPath& p = tr.geometry->path();
  double ess = -HUGE_VAL, vol = -HUGE_VAL;
  for (const auto& row : tr.rows) {
    const double u = closed_form_homogeneous(p, row.t), ut = homogeneous_forcing(p, row.t) - u;
    const double utt = homogeneous_forcing_rate(p, row.t) - ut;
    ess = std::max(ess, std::expm1(row.t) * ut - 2 * row.t);
    vol = std::max(vol, std::exp(row.t) * (utt + ut));
  }
  CHECK(essential_decreasing_report(tr).C == doctest::Approx(ess).epsilon(1e-6).scale(1));
  CHECK(volume_form_decreasing_report(tr).C == doctest::Approx(vol).epsilon(1e-6).scale(1));
}

TEST_CASE("divisor lower bound on the contraction") {
  const Trajectory& tr = preset_run("f1-contraction");
  const auto r = lower_bound_report(tr, LowerBoundMode::Divisor);
  CHECK(std::isfinite(r.C));
  CHECK(r.holds);
  CHECK_THROWS_AS(lower_bound_report(preset_run("f1-fiber-collapse"), LowerBoundMode::Divisor), DiagnosticError);
}

TEST_CASE("collapsing diagnostics reject non-collapsing and short trajectories") {
  CHECK_THROWS_AS(collapsing_report(preset_run("f1-contraction")), DiagnosticError);
  CHECK_THROWS_AS(fit_exponent(preset_run("f1-contraction")), DiagnosticError);
  const Trajectory short_run = prefix(preset_run("f1-fiber-collapse"), 5);
  CHECK_THROWS_AS(essential_decreasing_report(short_run), DiagnosticError);
  CHECK_THROWS_AS(fit_exponent(short_run), DiagnosticError);
}

TEST_CASE("fit_line recovers exact lines") {
  const std::vector<double> x{0, 1, 2, 3.5, 7};
  std::vector<double> y;
  for (double v : x) y.push_back(1.25 - 0.75 * v);
  const auto [c0, slope, rms] = fit_line(x, y);
  CHECK(c0 == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(slope == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(rms <= 1e-14);
  CHECK_THROWS_AS(fit_line({1.0}, {2.0}), DiagnosticError);
  CHECK_THROWS_AS(fit_line({1.0, 1.0}, {2.0, 3.0}), DiagnosticError);
}

TEST_CASE("torus collapse exponent") {
  const AsymptoticFit f = fit_exponent(preset_run("torus-infinite-collapse"));
  CHECK(f.k_reference == 2);
  CHECK(f.relative_error() <= 0.05);
}

TEST_CASE("property: sup constants never decrease as the trajectory is extended") {
  for (const char* name : {"f1-fiber-collapse", "f1-contraction", "homog-cp2-fano"}) {
    CAPTURE(name);
    const Trajectory& tr = preset_run(name);
    double ess = -HUGE_VAL, vol = -HUGE_VAL;
    for (std::size_t n = kMinSnapshots; n <= tr.snapshots.size(); ++n) {
      const Trajectory p = prefix(tr, n);
      const double e = essential_decreasing_report(p).C, v = volume_form_decreasing_report(p).C;
      CHECK(e >= ess);
      CHECK(v >= vol);
      ess = e;
      vol = v;
    }
  }
}

TEST_CASE("limit profile of the contraction concentrates on the exceptional end") {
  const LimitProfile lp = limit_profile(preset_run("f1-contraction"));
  CHECK(lp.nested_in_A);
  CHECK(lp.nested_in_t);
  REQUIRE(!lp.sets.empty());
  for (std::size_t i = 1; i < lp.sets.size(); ++i) CHECK(lp.sets[i].count <= lp.sets[i - 1].count);
  CHECK(lp.sets.back().count == 0);
  REQUIRE(lp.sets.size() >= 2);
  const SublevelSet& deepest = lp.sets[lp.sets.size() - 2];
  REQUIRE(deepest.count > 0);
  CHECK(deepest.coord_mean < 0);
  CHECK(deepest.fraction < 1);
}

TEST_CASE("limit profile of the fiber collapse exhausts X") {
  const LimitProfile lp = limit_profile(preset_run("f1-fiber-collapse"));
  CHECK(lp.nested_in_A);
  CHECK(lp.nested_in_t);
  for (double A : {1.0, 2.0, 4.0}) {
    CAPTURE(A);
    bool found = false;
    for (const auto& s : lp.sets)
      if (s.A == A) {
        found = true;
        CHECK(s.fraction == 1.0);
      }
    CHECK(found);
  }
}

TEST_CASE("AM-GM slack is non-negative at every snapshot") {
  for (const char* name : {"f1-fiber-collapse", "f1-contraction", "homog-cp2-fano", "product-hyp-x-elliptic"}) {
    CAPTURE(name);
    const Trajectory& tr = preset_run(name);
    CHECK(tr.amgm_violations == 0);
    for (const auto& r : tr.rows) {
      CHECK(r.amgm_violations == 0);
      CHECK(r.amgm_min_slack >= -1e-12);
    }
  }
}

TEST_CASE("Fano total collapse: type-I curvature and u stay bounded") {
  const auto reps = curvature_probe_report(preset_run("fano-total-collapse"));
  bool seen = false;
  for (const auto& r : reps) {
    if (r.name != "type_one") continue;
    seen = true;
    CHECK(std::isfinite(r.C));
    CHECK(std::isfinite(r.constant("inf_u")));
  }
  CHECK(seen);
  for (const auto& row : preset_run("fano-total-collapse").rows) {
    CHECK(std::isfinite(row.min_u));
    CHECK(std::isfinite(row.max_u));
  }
}

TEST_CASE("relative drift uses the floor") {
  CHECK(relative_drift(2.0, 2.1) == doctest::Approx(0.05));
  CHECK(relative_drift(0.0, 0.01) == doctest::Approx(0.1));
  CHECK(relative_drift(1.0, 1.0) == 0.0);
}

TEST_CASE("apply_refinements settles verdicts") {
  InequalityReport stable, unstable, divergent;
  stable.name = "a";
  stable.C = 1.0;
  unstable.name = "b";
  unstable.C = 1.0;
  divergent.name = "c";
  divergent.C = 1.0;
  divergent.verdict = Verdict::Diverges;
  std::vector<InequalityReport> base{stable, unstable, divergent};
  InequalityReport s2 = stable, u2 = unstable, d2 = divergent;
  s2.C = 1.05;
  u2.C = 1.5;
  d2.C = 5.0;
  apply_refinements(base, {{"dt/2", {s2, u2, d2}}});
  CHECK(base[0].verdict == Verdict::BoundedStable);
  CHECK(base[1].verdict == Verdict::BoundedUnstable);
  CHECK(base[2].verdict == Verdict::Diverges);
  REQUIRE(base[0].refinements.size() == 1);
  CHECK(base[0].refinements[0].drift == doctest::Approx(0.05));
}
