#include "krf/flow.hpp"
#include "krf/scenario.hpp"

#include <doctest.h>
#include <omp.h>

#include <algorithm>
#include <cmath>

using namespace krf;

namespace {

std::shared_ptr<const ReducedGeometry> geometry_of(const ScenarioConfig& c) {
  return make_geometry(class_path(c.kahler_class()), c.backend);
}

double max_abs(const Field& f) {
  double m = 0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

const FlowState& snapshot_at(const Trajectory& tr, double t) {
  for (const auto& s : tr.snapshots)
    if (std::abs(s.t - t) < 1e-12) return s;
  FAIL("no snapshot at t = " << t);
  return tr.snapshots.front();
}

}  // namespace

TEST_CASE("CP2 Fano flow matches the closed form near T") {
  ScenarioConfig c = preset_config("homog-cp2-fano");
  const auto g = geometry_of(c);
  const ClassPath& p = g->path();
  const double t1 = p.singular_time() - 0.1;
  const Trajectory tr = evolve(g, c.controller);
  CHECK(tr.termination == TerminationReason::ReachedStop);
  const FlowState& s = snapshot_at(tr, t1);
  const double u = closed_form_homogeneous(p, t1), ut = homogeneous_forcing(p, t1) - u;
  const double utt = homogeneous_forcing_rate(p, t1) - ut;
  const Field pu = g->to_points(s.u), put = g->to_points(s.ut), putt = g->to_points(compute_utt(s, *g));
  for (std::size_t i = 0; i < pu.size(); ++i) {
    CHECK(std::abs(pu[i] - u) <= 1e-8);
    CHECK(std::abs(put[i] - ut) <= 1e-6);
    CHECK(std::abs(putt[i] - utt) <= 1e-6);
  }
}

TEST_CASE("flat torus flow matches -2 (t - 1 + e^{-t})") {
  ScenarioConfig c = preset_config("torus-infinite-collapse");
  c.backend.torus_nodes = 32;
  c.controller.t_max = 8;
  const auto g = geometry_of(c);
  const Trajectory tr = evolve(g, c.controller);
  REQUIRE(tr.snapshots.size() > 10);
  for (const auto& s : tr.snapshots) {
    const double exact = -2 * (s.t - 1 + std::exp(-s.t));
    const Field pu = g->to_points(s.u);
    CHECK(std::abs(*std::max_element(pu.begin(), pu.end()) - exact) <= 1e-8);
    CHECK(std::abs(*std::min_element(pu.begin(), pu.end()) - exact) <= 1e-8);
  }
}

TEST_CASE("fixed-step backward Euler is first order") {
  ScenarioConfig c = preset_config("homog-cp2-fano");
  const auto g = geometry_of(c);
  const double H = 0.4;
  auto error = [&](int steps) {
    FlowState s = initial_state(*g);
    for (int i = 0; i < steps; ++i) s = implicit_euler_step(s, H / steps, *g, c.controller);
    return std::abs(g->to_points(s.u)[0] - closed_form_homogeneous(g->path(), H));
  };
  const double e1 = error(16), e2 = error(32), e3 = error(64);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  CHECK(o1 >= 0.8);
  CHECK(o1 <= 1.2);
  CHECK(o2 >= 0.8);
  CHECK(o2 <= 1.2);
}

TEST_CASE("Kähler-Einstein product is a fixed point for 10^4 steps") {
  ScenarioConfig c = preset_config("product-ke-fixed");
  const auto g = geometry_of(c);
  FlowState s = initial_state(*g);
  for (int i = 0; i < 10000; ++i) s = implicit_euler_step(s, 0.01, *g, c.controller);
  CHECK(s.t == doctest::Approx(100.0));
  CHECK(max_abs(s.u) <= c.controller.newton_tol);
}

TEST_CASE("serial and parallel trajectories are identical") {
  omp_set_num_threads(4);
  ScenarioConfig c = preset_config("f1-contraction");
  c.backend.line.nodes = 4096;
  c.controller.stop_offset = class_path(c.kahler_class()).singular_time() / 2 - 1e-3;
  c.backend.exec = kernels::Exec::Serial;
  const Trajectory a = evolve(geometry_of(c), c.controller);
  c.backend.exec = kernels::Exec::Parallel;
  const Trajectory b = evolve(geometry_of(c), c.controller);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  CHECK(a.accepted_steps == b.accepted_steps);
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    CHECK(a.snapshots[i].t == b.snapshots[i].t);
    CHECK(a.snapshots[i].u == b.snapshots[i].u);
  }
}

TEST_CASE("snapshot schedule") {
  SUBCASE("finite T") {
    const ClassPath p = class_path(KahlerClass{ModelGeometry::hirzebruch(1), {Rational(2), Rational(5)}});
    StepController c;
    c.extra_times = {0.123, 5.0};
    const auto ts = snapshot_schedule(p, c);
    const double stop = p.singular_time() - c.stop_offset;
    CHECK(ts.front() > 0.0);
    CHECK(ts.back() == doctest::Approx(stop).epsilon(1e-14));
    CHECK(std::is_sorted(ts.begin(), ts.end()));
    CHECK(std::adjacent_find(ts.begin(), ts.end()) == ts.end());
    CHECK(std::count(ts.begin(), ts.end(), 0.123) == 1);
    CHECK(ts.back() < p.singular_time());
    // Geometric refinement toward T: gaps shrink once past T/2.
    for (std::size_t i = 2; i < ts.size(); ++i)
      if (ts[i - 2] > p.singular_time() / 2 && ts[i] < stop && ts[i - 1] != 0.123)
        CHECK(ts[i] - ts[i - 1] <= ts[i - 1] - ts[i - 2] + 1e-15);
  }
  SUBCASE("infinite T") {
    const ClassPath p = class_path(KahlerClass{ModelGeometry::torus(2), {Rational(1), Rational(1)}});
    StepController c;
    c.t_max = 5;
    const auto ts = snapshot_schedule(p, c);
    REQUIRE(ts.size() == 10);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(ts[i] == doctest::Approx(0.5 * (i + 1)));
  }
}

TEST_CASE("no positivity or AM-GM violations on the Hirzebruch presets") {
  for (const char* name : {"f1-contraction", "f1-fiber-collapse"}) {
    CAPTURE(name);
    ScenarioConfig c = preset_config(name);
    const Trajectory tr = evolve(geometry_of(c), c.controller);
    CHECK(tr.positivity_violations == 0);
    CHECK(tr.amgm_violations == 0);
    for (const auto& r : tr.rows) CHECK(r.pos_margin > 0);
  }
}
