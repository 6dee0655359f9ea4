#include "krf/cohomology.hpp"
#include "krf/errors.hpp"
#include "krf/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace krf;

namespace {

ClassPath f1(const char* x, const char* y) {
  return class_path(KahlerClass{ModelGeometry::hirzebruch(1), {parse_rational(x), parse_rational(y)}});
}

}  // namespace

TEST_CASE("hirzebruch fiber collapse: T = ln 2, k = 1") {
  const ClassPath p = f1("2", "5");
  CHECK(std::abs(p.singular_time() - std::log(2.0)) < 1e-12);
  CHECK(p.collapse_exponent() == 1);
  CHECK(p.regime().kind == RegimeKind::FiniteCollapsing);
  CHECK(p.regime().wall == LimitWall::Fiber);
  CHECK(*p.singular_q() == Rational(1, 2));
}

TEST_CASE("hirzebruch contraction: T = ln 1.2, V(T) = 1/4") {
  const ClassPath p = f1("1", "1.2");
  CHECK(std::abs(p.singular_time() - std::log(1.2)) < 1e-12);
  CHECK(p.regime().kind == RegimeKind::FiniteNonCollapsing);
  CHECK(p.regime().wall == LimitWall::Section);
  CHECK(std::abs(p.volume_at_singular_time() - 0.25) < 1e-12);
  // Exact: V(q_T) from the rational polynomial.
  CHECK(p.volume_polynomial()(*p.singular_q()) == Rational(1, 4));
}

TEST_CASE("canonical classes") {
  CHECK(canonical_class(ModelGeometry::hirzebruch(1)) == std::vector<Rational>{Rational(-2), Rational(-3)});
  CHECK(canonical_class(ModelGeometry::projective_space(2)) == std::vector<Rational>{Rational(-3)});
  CHECK(canonical_class(ModelGeometry::torus(2)) == std::vector<Rational>{Rational(0), Rational(0)});
}

TEST_CASE("fano ray on CP^2 is a double-root total collapse") {
  for (const char* lam : {"0.5", "1", "2"}) {
    const Rational c = Rational(3) * parse_rational(lam);
    const ClassPath p = class_path(KahlerClass{ModelGeometry::projective_space(2), {c}});
    CHECK(p.regime().kind == RegimeKind::FiniteCollapsing);
    CHECK(p.collapse_exponent() == 2);
    CHECK(std::abs(p.singular_time() - std::log(1.0 + to_double(parse_rational(lam)))) < 1e-12);
  }
}

TEST_CASE("infinite-time regimes") {
  const auto torus = class_path(KahlerClass{ModelGeometry::torus(2), {Rational(1), Rational(1)}});
  CHECK(!torus.finite_time());
  CHECK(torus.regime().kind == RegimeKind::InfiniteCollapsing);
  CHECK(torus.collapse_exponent() == 2);

  const auto hxe = class_path(KahlerClass{ModelGeometry::parse("product:-1@1,0@1"), {Rational(1), Rational(1)}});
  CHECK(hxe.regime().kind == RegimeKind::InfiniteCollapsing);
  CHECK(hxe.collapse_exponent() == 1);

  const auto ke = class_path(KahlerClass{ModelGeometry::parse("product:-1@1,-1@1"), {Rational(1), Rational(1)}});
  CHECK(ke.regime().kind == RegimeKind::InfiniteNonCollapsing);
  CHECK(ke.omega_inf() == ke.omega0().coords);
}

TEST_CASE("non-Kähler classes are rejected") {
  CHECK(!is_kahler(KahlerClass{ModelGeometry::hirzebruch(1), {Rational(2), Rational(2)}}));
  CHECK_THROWS_AS(f1("2", "1"), DomainError);
  CHECK_THROWS_AS(ModelGeometry::parse("klein:2"), ConfigError);
}

TEST_CASE("property: volume along the path matches the volume polynomial") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> x(0.5, 3.0), dy(0.1, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double xv = x(rng), yv = xv + dy(rng);
    const ClassPath p = class_path(KahlerClass{ModelGeometry::hirzebruch(1), {to_rational(xv), to_rational(yv)}});
    const double T = p.singular_time();
    for (double frac : {0.0, 0.3, 0.9}) {
      const double t = std::isfinite(T) ? frac * T : frac * 5;
      const auto c = p.coordinates_at(t);
      const double direct = ModelGeometry::hirzebruch(1).volume(c);
      CHECK(p.volume_at(t) == doctest::Approx(direct).epsilon(1e-12));
      CHECK(p.volume_at(t) > 0);
    }
  }
}

TEST_CASE("property: the class stays Kähler strictly before T") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(1, 40);
  for (int trial = 0; trial < 40; ++trial) {
    const Rational xr(num(rng), 10), yr = xr + Rational(num(rng), 10);
    const ClassPath p = class_path(KahlerClass{ModelGeometry::hirzebruch(1), {xr, yr}});
    if (!p.finite_time()) continue;
    const Rational q = *p.singular_q();
    const Rational before = q + (Rational(1) - q) / Rational(1000);
    CHECK(is_kahler(KahlerClass{p.model(), p.coordinates_at_q(before)}));
    CHECK(!is_kahler(KahlerClass{p.model(), p.coordinates_at_q(q)}));
  }
}

TEST_CASE("sweep over a 5x5 Hirzebruch grid partitions by the wall competition") {
  const auto rows = sweep("hirzebruch:1", "1:3:5;2:6:5", false);
  CHECK(rows.size() == 25);
  int inside = 0;
  for (const auto& r : rows) {
    if (!r.in_cone) continue;
    ++inside;
    const double x = to_double(parse_rational(r.coords[0])), y = to_double(parse_rational(r.coords[1]));
    // Fiber wall at q = 2/(x+2), section wall at q = 1/(y-x+1); the larger q is hit first.
    const double qf = 2 / (x + 2), qs = 1 / (y - x + 1);
    if (qf > qs) CHECK(r.regime == "FiniteCollapsing(1)");
    else if (qf < qs) CHECK(r.regime == "FiniteNonCollapsing");
    else CHECK(r.regime == "FiniteCollapsing(2)");
  }
  CHECK(inside > 0);
  CHECK(inside < 25);
}

TEST_CASE("single-point sweep agrees with the class path") {
  const auto rows = sweep("hirzebruch:1", "2;5", false);
  REQUIRE(rows.size() == 1);
  const ClassPath p = f1("2", "5");
  CHECK(rows[0].regime == describe(p.regime()));
  CHECK(rows[0].T == p.singular_time());
  CHECK(rows[0].k == p.collapse_exponent());
}
