#pragma once

#include "krf/rational.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace krf {

enum class ModelKind { Hirzebruch, ProjectiveSpace, ProductOfKEFactors, TorusSeparable };

/// One factor of a product model: a compact Kähler–Einstein manifold of
/// complex dimension `dim` whose reference form satisfies Ric = ricci * form.
/// The reference form has unit volume.
struct ModelFactor {
  int dim = 1;
  int ricci = 0;
};

struct KEFactorSpec {
  int einstein_sign = 0;  // -1, 0, +1
  int dim = 1;
};

class ModelGeometry {
 public:
  static ModelGeometry hirzebruch(int a);
  static ModelGeometry projective_space(int n);
  static ModelGeometry product(std::vector<KEFactorSpec> factors);
  static ModelGeometry torus(int n);
  /// "hirzebruch:1", "projective:2", "product:-1@1,0@1", "torus:2".
  static ModelGeometry parse(const std::string& spec);

  ModelKind kind() const { return kind_; }
  int dimension() const { return n_; }
  int hirzebruch_degree() const { return a_; }
  std::size_t coordinate_count() const;
  /// Factor list for ProjectiveSpace / Product / Torus; empty for Hirzebruch.
  const std::vector<ModelFactor>& factors() const { return factors_; }
  std::string spec() const;

  /// Linear functionals l_j with class Kähler iff l_j(c) > 0 for all j.
  std::vector<std::vector<Rational>> cone_walls() const;
  std::vector<std::string> wall_names() const;

  /// Top self-intersection [c]^n (un-normalized intersection numbers).
  template <class Scalar>
  Scalar volume(const std::vector<Scalar>& c) const;
  /// Volume of the linear path c(q) = c_inf + q (c_0 - c_inf), as a polynomial in q.
  RationalPolynomial volume_polynomial(const std::vector<Rational>& c_inf, const std::vector<Rational>& c0) const;

 private:
  ModelKind kind_ = ModelKind::Hirzebruch;
  int n_ = 2;
  int a_ = 0;
  std::vector<ModelFactor> factors_;
};

struct KahlerClass {
  ModelGeometry model;
  std::vector<Rational> coords;

  std::vector<double> values() const;
};

bool is_kahler(const KahlerClass& c);

/// Coordinates of K_X in the model basis.
std::vector<Rational> canonical_class(const ModelGeometry& m);

enum class RegimeKind { FiniteNonCollapsing, FiniteCollapsing, InfiniteNonCollapsing, InfiniteCollapsing };

enum class LimitWall { None, Fiber, Section, FiberAndSection, Factor };

struct Regime {
  RegimeKind kind = RegimeKind::InfiniteNonCollapsing;
  int k = 0;
  LimitWall wall = LimitWall::None;
  /// The limit class has a smooth semi-positive representative.
  bool semi_ample_limit = false;
  std::vector<int> walls_hit;  // indices into cone_walls()
};

std::string to_string(RegimeKind kind);
std::string to_string(LimitWall wall);
std::string describe(const Regime& r);

class ClassPath {
 public:
  const ModelGeometry& model() const { return omega0_.model; }
  const KahlerClass& omega0() const { return omega0_; }
  const std::vector<Rational>& omega_inf() const { return omega_inf_; }
  const std::vector<double>& omega0_values() const { return c0_; }
  const std::vector<double>& omega_inf_values() const { return cinf_; }
  bool finite_time() const { return q_singular_.has_value(); }
  /// Singular time, +inf when the path stays in the cone.
  double singular_time() const { return T_; }
  const std::optional<Rational>& singular_q() const { return q_singular_; }
  const RationalPolynomial& volume_polynomial() const { return volume_; }
  int collapse_exponent() const { return k_; }
  /// C in V ~ C (T-t)^k, or V ~ C e^{-kt} when T is infinite.
  double leading_coefficient() const { return leading_; }
  const Regime& regime() const { return regime_; }

  /// Coordinates of [omega_t] at q = e^{-t}: q*omega0 + (1-q)*omega_inf.
  std::vector<double> coordinates_at(double t) const;
  std::vector<Rational> coordinates_at_q(const Rational& q) const;
  /// Cohomological volume [omega_t]^n.
  double volume_at(double t) const;
  double volume_at_singular_time() const;

  friend ClassPath class_path(const ModelGeometry&, const KahlerClass&);

 private:
  KahlerClass omega0_;
  std::vector<Rational> omega_inf_;
  std::optional<Rational> q_singular_;
  double T_ = std::numeric_limits<double>::infinity();
  RationalPolynomial volume_;
  std::vector<double> c0_, cinf_, volume_coeffs_;
  int k_ = 0;
  double leading_ = 0.0;
  Regime regime_;
};

ClassPath class_path(const ModelGeometry& m, const KahlerClass& omega0);
inline ClassPath class_path(const KahlerClass& omega0) { return class_path(omega0.model, omega0); }

double singular_time(const ClassPath& p);
const RationalPolynomial& volume_polynomial(const ClassPath& p);
int collapse_exponent(const ClassPath& p);
Regime classify_regime(const ClassPath& p);

/// Multiplicity of `root` as a zero of `p` (exact).
int root_multiplicity(const RationalPolynomial& p, const Rational& root);

}  // namespace krf
