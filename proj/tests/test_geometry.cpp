#include "krf/errors.hpp"
#include "krf/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace krf;

namespace {

std::shared_ptr<const ReducedGeometry> hirzebruch(const char* x, const char* y, int nodes = 512) {
  BackendSettings s;
  s.line.nodes = nodes;
  return make_geometry(class_path(KahlerClass{ModelGeometry::hirzebruch(1), {parse_rational(x), parse_rational(y)}}), s);
}

std::shared_ptr<const ReducedGeometry> torus(int nodes = 64, double ripple = 0.2) {
  BackendSettings s;
  s.torus_nodes = nodes;
  s.torus_ripple = ripple;
  return make_geometry(class_path(KahlerClass{ModelGeometry::torus(2), {Rational(1), Rational(1)}}), s);
}

/// Smooth bump in the reduced coordinate, decaying like e^{-|rho|} at both ends.
Field bump(const ReducedGeometry& g, double amp, double centre) {
  Field u(g.dof());
  for (int i = 0; i < g.dof(); ++i) {
    const double c = std::cosh(0.5 * (g.point_coordinate(i) - centre));
    u[i] = amp / (c * c);
  }
  return u;
}

Field ripple_field(const ReducedGeometry& g, double amp, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ph(0, 6.283185307179586);
  const int m = g.settings().torus_nodes;
  const double L = g.settings().torus_period;
  Field u(g.dof());
  for (int b = 0; b < g.dof() / m; ++b) {
    const double p = ph(rng);
    for (int i = 0; i < m; ++i) u[b * m + i] = amp * std::sin(2 * 3.141592653589793 * i / m + p) * L;
  }
  return u;
}

void check_linearization(const ReducedGeometry& g, const Field& u, double t, const Field& v) {
  const auto J = g.linearization(u, t);
  Eigen::Map<const Eigen::VectorXd> vv(v.data(), v.size());
  const Eigen::VectorXd Jv = J * vv;
  const Field lap = g.laplacian(u, t, v);
  const double h = 1e-6;
  Field up = u, um = u;
  for (int i = 0; i < g.dof(); ++i) up[i] += h * v[i], um[i] -= h * v[i];
  const Field fp = g.ma_log(up, t), fm = g.ma_log(um, t);
  double scale = 0, err_fd = 0, err_lap = 0;
  for (int i = 0; i < g.dof(); ++i) {
    scale = std::max(scale, std::abs(Jv[i]));
    err_fd = std::max(err_fd, std::abs((fp[i] - fm[i]) / (2 * h) - Jv[i]));
    err_lap = std::max(err_lap, std::abs(lap[i] - Jv[i]));
  }
  CHECK(err_fd <= 1e-5 * std::max(1.0, scale));
  CHECK(err_lap <= 1e-12 * std::max(1.0, scale));
}

}  // namespace

TEST_CASE("volume quadrature matches the cohomological volume") {
  for (auto [x, y] : {std::pair{"1", "1.2"}, std::pair{"2", "5"}}) {
    for (int n : {512, 2048}) {
      const auto g = hirzebruch(x, y, n);
      const double T = g->singular_time();
      const double tol = n == 512 ? 1e-2 : 2.5e-3;
      for (double frac : {0.0, 0.5, 0.9, 0.99}) {
        const double t = frac * T;
        const Field u(g->dof(), 0.0);
        const double V = g->path().volume_at(t);
        CAPTURE(x);
        CAPTURE(n);
        CAPTURE(t);
        CHECK(std::abs(g->volume_quadrature(u, t) - V) <= tol * V);
      }
    }
  }
}

TEST_CASE("volume quadrature is invariant under compactly supported potentials") {
  const auto g = hirzebruch("2", "5", 1024);
  const double t = 0.3;
  const double v0 = g->volume_quadrature(Field(g->dof(), 0.0), t);
  CHECK(g->volume_quadrature(bump(*g, 0.1, 0.5), t) == doctest::Approx(v0).epsilon(1e-4));
  const auto tg = torus();
  const double w0 = tg->volume_quadrature(Field(tg->dof(), 0.0), 0.5);
  CHECK(tg->volume_quadrature(ripple_field(*tg, 0.01, 3), 0.5) == doctest::Approx(w0).epsilon(1e-10));
  CHECK(w0 == doctest::Approx(tg->path().volume_at(0.5)).epsilon(1e-10));
}

TEST_CASE("homogeneous volume is exact") {
  BackendSettings s;
  const auto g = make_geometry(class_path(KahlerClass{ModelGeometry::projective_space(2), {Rational(3)}}), s);
  for (double t : {0.0, 0.3, 0.6})
    CHECK(g->volume_quadrature(Field(g->dof(), 0.0), t) == doctest::Approx(g->path().volume_at(t)).epsilon(1e-12));
}

TEST_CASE("divisor log|sigma|^2 is non-positive") {
  const auto g = hirzebruch("1", "1.2");
  const Field s = g->divisor_log_sigma();
  REQUIRE(static_cast<int>(s.size()) == g->points());
  for (double v : s) CHECK(v <= 0.0);
  CHECK_THROWS_AS(torus()->divisor_log_sigma(), Unsupported);
}

TEST_CASE("linearization agrees with finite differences of ma_log") {
  SUBCASE("calabi") {
    const auto g = hirzebruch("2", "5", 256);
    Field v = bump(*g, 1.0, -2.0);
    const Field w = bump(*g, -0.7, 3.0);
    for (int i = 0; i < g->dof(); ++i) v[i] += w[i];
    check_linearization(*g, bump(*g, 0.05, 1.0), 0.2, v);
    check_linearization(*g, Field(g->dof(), 0.0), 0.6, v);
  }
  SUBCASE("torus") {
    const auto g = torus();
    check_linearization(*g, ripple_field(*g, 0.005, 9), 0.4, ripple_field(*g, 1.0, 4));
  }
}

TEST_CASE("property: AM-GM and eigenvalue consistency at random potentials") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> amp(-0.1, 0.1), c(-3, 3), frac(0, 0.9);
  for (const auto& g : {hirzebruch("2", "5", 256), hirzebruch("1", "1.2", 256)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const double t = frac(rng) * g->singular_time();
      const Field u = bump(*g, amp(rng), c(rng));
      if (!g->positivity(u, t).ok) continue;
      const Field tr = g->trace_w0(u, t), lv = g->log_volume_ratio_w0(u, t);
      const EigenRange e = g->eigen_range_w0(u, t);
      for (int p = 0; p < g->points(); ++p) {
        CHECK(tr[p] >= 2 * std::exp(lv[p] / 2) * (1 - 1e-12));
        CHECK(e.min[p] <= e.max[p]);
        CHECK(e.min[p] > 0);
        CHECK(std::log(e.min[p] * e.max[p]) == doctest::Approx(-lv[p]).epsilon(1e-8).scale(1));
        CHECK(1 / e.min[p] + 1 / e.max[p] == doctest::Approx(tr[p]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("positivity holds for the reference form before T") {
  const auto g = hirzebruch("2", "5");
  const double T = g->singular_time();
  for (double frac : {0.0, 0.5, 0.99}) CHECK(g->positivity(Field(g->dof(), 0.0), frac * T).ok);
  CHECK_THROWS_AS(g->reference_potential(T), DomainError);
}

TEST_CASE("homogeneous forcing is the derivative of the closed form relation") {
  const ClassPath p = class_path(KahlerClass{ModelGeometry::projective_space(2), {Rational(3)}});
  const double h = 1e-5;
  for (double t : {0.1, 0.4, 0.6}) {
    const double up = closed_form_homogeneous(p, t + h), um = closed_form_homogeneous(p, t - h);
    const double ut = (up - um) / (2 * h);
    CHECK(ut == doctest::Approx(homogeneous_forcing(p, t) - closed_form_homogeneous(p, t)).epsilon(1e-7));
    const double gp = (homogeneous_forcing(p, t + h) - homogeneous_forcing(p, t - h)) / (2 * h);
    CHECK(gp == doctest::Approx(homogeneous_forcing_rate(p, t)).epsilon(1e-7));
  }
}
