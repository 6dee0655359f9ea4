#include "krf/cohomology.hpp"

#include "krf/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace krf {

namespace {

long long factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

long long multinomial(const std::vector<ModelFactor>& factors) {
  int n = 0;
  long long den = 1;
  for (const auto& f : factors) {
    n += f.dim;
    den *= factorial(f.dim);
  }
  return factorial(n) / den;
}

Rational pair_wall(const std::vector<Rational>& functional, const std::vector<Rational>& c) {
  Rational acc = 0;
  for (std::size_t i = 0; i < c.size(); ++i) acc += functional[i] * c[i];
  return acc;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("model spec: bad integer '" + s + "' for " + what);
  }
}

}  // namespace

ModelGeometry ModelGeometry::hirzebruch(int a) {
  if (a < 1) throw ConfigError("Hirzebruch degree must be >= 1");
  ModelGeometry m;
  m.kind_ = ModelKind::Hirzebruch;
  m.n_ = 2;
  m.a_ = a;
  return m;
}

ModelGeometry ModelGeometry::projective_space(int n) {
  if (n < 2) throw ConfigError("projective space needs n >= 2");
  ModelGeometry m;
  m.kind_ = ModelKind::ProjectiveSpace;
  m.n_ = n;
  m.factors_ = {ModelFactor{n, n + 1}};
  return m;
}

ModelGeometry ModelGeometry::product(std::vector<KEFactorSpec> factors) {
  ModelGeometry m;
  m.kind_ = ModelKind::ProductOfKEFactors;
  m.n_ = 0;
  for (const auto& f : factors) {
    if (f.dim < 1) throw ConfigError("product factor dimension must be >= 1");
    if (f.einstein_sign < -1 || f.einstein_sign > 1) throw ConfigError("Einstein sign must be -1, 0 or +1");
    m.factors_.push_back(ModelFactor{f.dim, f.einstein_sign});
    m.n_ += f.dim;
  }
  if (m.n_ < 2) throw ConfigError("total dimension must be >= 2");
  return m;
}

ModelGeometry ModelGeometry::torus(int n) {
  if (n < 2) throw ConfigError("torus needs n >= 2");
  ModelGeometry m;
  m.kind_ = ModelKind::TorusSeparable;
  m.n_ = n;
  m.factors_.assign(n, ModelFactor{1, 0});
  return m;
}

ModelGeometry ModelGeometry::parse(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("model spec needs '<kind>:<params>', got '" + spec + "'");
  std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  if (kind == "hirzebruch") return hirzebruch(parse_int(rest, "hirzebruch degree"));
  if (kind == "projective") return projective_space(parse_int(rest, "projective dimension"));
  if (kind == "torus") return torus(parse_int(rest, "torus dimension"));
  if (kind == "product") {
    std::vector<KEFactorSpec> factors;
    for (const auto& item : split(rest, ',')) {
      auto at = item.find('@');
      if (at == std::string::npos) throw ConfigError("product factor must be '<sign>@<dim>', got '" + item + "'");
      factors.push_back({parse_int(item.substr(0, at), "Einstein sign"), parse_int(item.substr(at + 1), "factor dim")});
    }
    return product(std::move(factors));
  }
  throw ConfigError("unsupported model kind '" + kind + "'");
}

std::size_t ModelGeometry::coordinate_count() const {
  return kind_ == ModelKind::Hirzebruch ? 2 : factors_.size();
}

std::string ModelGeometry::spec() const {
  switch (kind_) {
    case ModelKind::Hirzebruch: return "hirzebruch:" + std::to_string(a_);
    case ModelKind::ProjectiveSpace: return "projective:" + std::to_string(n_);
    case ModelKind::TorusSeparable: return "torus:" + std::to_string(n_);
    case ModelKind::ProductOfKEFactors: {
      std::string s = "product:";
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(factors_[i].ricci) + "@" + std::to_string(factors_[i].dim);
      }
      return s;
    }
  }
  return {};
}

std::vector<std::vector<Rational>> ModelGeometry::cone_walls() const {
  if (kind_ == ModelKind::Hirzebruch) {
    // [omega].f = x and [omega].C = y - a x.
    return {{Rational(1), Rational(0)}, {Rational(-a_), Rational(1)}};
  }
  std::vector<std::vector<Rational>> walls;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    std::vector<Rational> w(factors_.size(), Rational(0));
    w[i] = 1;
    walls.push_back(std::move(w));
  }
  return walls;
}

std::vector<std::string> ModelGeometry::wall_names() const {
  if (kind_ == ModelKind::Hirzebruch) return {"fiber", "section"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < factors_.size(); ++i) names.push_back("factor" + std::to_string(i));
  return names;
}

template <class Scalar>
Scalar ModelGeometry::volume(const std::vector<Scalar>& c) const {
  if (kind_ == ModelKind::Hirzebruch) {
    // (xC + yf)^2 = -a x^2 + 2xy.
    return c[0] * (Scalar(2) * c[1] - Scalar(a_) * c[0]);
  }
  Scalar v = Scalar(multinomial(factors_));
  for (std::size_t i = 0; i < factors_.size(); ++i)
    for (int d = 0; d < factors_[i].dim; ++d) v = v * c[i];
  return v;
}

template double ModelGeometry::volume<double>(const std::vector<double>&) const;
template Rational ModelGeometry::volume<Rational>(const std::vector<Rational>&) const;

RationalPolynomial ModelGeometry::volume_polynomial(const std::vector<Rational>& c_inf,
                                                    const std::vector<Rational>& c0) const {
  std::vector<RationalPolynomial> path;
  for (std::size_t i = 0; i < c0.size(); ++i) path.push_back(RationalPolynomial::linear(c_inf[i], c0[i] - c_inf[i]));
  if (kind_ == ModelKind::Hirzebruch) {
    auto second = RationalPolynomial::constant(2) * path[1] + RationalPolynomial::constant(-a_) * path[0];
    return path[0] * second;
  }
  auto v = RationalPolynomial::constant(Rational(multinomial(factors_)));
  for (std::size_t i = 0; i < factors_.size(); ++i)
    for (int d = 0; d < factors_[i].dim; ++d) v = v * path[i];
  return v;
}

std::vector<double> KahlerClass::values() const {
  std::vector<double> v;
  for (const auto& c : coords) v.push_back(to_double(c));
  return v;
}

bool is_kahler(const KahlerClass& c) {
  if (c.coords.size() != c.model.coordinate_count())
    throw ConfigError("class has " + std::to_string(c.coords.size()) + " coordinates, model " + c.model.spec() +
                      " needs " + std::to_string(c.model.coordinate_count()));
  for (const auto& wall : c.model.cone_walls())
    if (pair_wall(wall, c.coords) <= 0) return false;
  return true;
}

std::vector<Rational> canonical_class(const ModelGeometry& m) {
  if (m.kind() == ModelKind::Hirzebruch) return {Rational(-2), Rational(-(m.hirzebruch_degree() + 2))};
  std::vector<Rational> k;
  for (const auto& f : m.factors()) k.push_back(Rational(-f.ricci));
  return k;
}

std::string to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::FiniteNonCollapsing: return "FiniteNonCollapsing";
    case RegimeKind::FiniteCollapsing: return "FiniteCollapsing";
    case RegimeKind::InfiniteNonCollapsing: return "InfiniteNonCollapsing";
    case RegimeKind::InfiniteCollapsing: return "InfiniteCollapsing";
  }
  return {};
}

std::string to_string(LimitWall wall) {
  switch (wall) {
    case LimitWall::None: return "none";
    case LimitWall::Fiber: return "fiber";
    case LimitWall::Section: return "section";
    case LimitWall::FiberAndSection: return "fiber+section";
    case LimitWall::Factor: return "factor";
  }
  return {};
}

std::string describe(const Regime& r) {
  std::string s = to_string(r.kind);
  if (r.kind == RegimeKind::FiniteCollapsing || r.kind == RegimeKind::InfiniteCollapsing)
    s += "(" + std::to_string(r.k) + ")";
  return s;
}

int root_multiplicity(const RationalPolynomial& p, const Rational& root) {
  if (p.is_zero()) return std::numeric_limits<int>::max();
  int mult = 0;
  RationalPolynomial cur = p;
  while (true) {
    Rational rem;
    RationalPolynomial quot = cur.divide_linear(root, rem);
    if (rem != 0) return mult;
    ++mult;
    cur = quot;
  }
}

std::vector<Rational> ClassPath::coordinates_at_q(const Rational& q) const {
  std::vector<Rational> c;
  for (std::size_t i = 0; i < omega_inf_.size(); ++i)
    c.push_back(q * omega0_.coords[i] + (Rational(1) - q) * omega_inf_[i]);
  return c;
}

std::vector<double> ClassPath::coordinates_at(double t) const {
  const double q = std::exp(-t);
  std::vector<double> c;
  for (std::size_t i = 0; i < cinf_.size(); ++i) c.push_back(q * c0_[i] + (1.0 - q) * cinf_[i]);
  return c;
}

double ClassPath::volume_at(double t) const {
  const double q = std::exp(-t);
  double acc = 0.0;
  for (auto it = volume_coeffs_.rbegin(); it != volume_coeffs_.rend(); ++it) acc = acc * q + *it;
  return acc;
}

double ClassPath::volume_at_singular_time() const {
  if (!q_singular_) return 0.0;
  return to_double(volume_(*q_singular_));
}

ClassPath class_path(const ModelGeometry& m, const KahlerClass& omega0) {
  if (!is_kahler(omega0)) throw DomainError("class_path: initial class is not Kähler");
  ClassPath p;
  p.omega0_ = omega0;
  p.omega0_.model = m;
  p.omega_inf_ = canonical_class(m);
  p.volume_ = m.volume_polynomial(p.omega_inf_, omega0.coords);
  for (std::size_t i = 0; i < p.omega_inf_.size(); ++i) {
    p.c0_.push_back(to_double(omega0.coords[i]));
    p.cinf_.push_back(to_double(p.omega_inf_[i]));
  }
  for (const auto& a : p.volume_.coeffs()) p.volume_coeffs_.push_back(to_double(a));

  const auto walls = m.cone_walls();
  std::optional<Rational> q_hit;
  std::vector<int> hit;
  std::vector<int> asymptotic;
  for (std::size_t j = 0; j < walls.size(); ++j) {
    const Rational l_inf = pair_wall(walls[j], p.omega_inf_);
    const Rational l0 = pair_wall(walls[j], omega0.coords);
    if (l_inf < 0) {
      const Rational qj = l_inf / (l_inf - l0);
      if (!q_hit || qj > *q_hit) {
        q_hit = qj;
        hit = {static_cast<int>(j)};
      } else if (qj == *q_hit) {
        hit.push_back(static_cast<int>(j));
      }
    } else if (l_inf == 0) {
      asymptotic.push_back(static_cast<int>(j));
    }
  }

  Regime& r = p.regime_;
  if (q_hit) {
    p.q_singular_ = q_hit;
    p.T_ = -std::log(to_double(*q_hit));
    p.k_ = root_multiplicity(p.volume_, *q_hit);
    RationalPolynomial rest = p.volume_;
    for (int i = 0; i < p.k_; ++i) {
      Rational rem;
      rest = rest.divide_linear(*q_hit, rem);
    }
    Rational lead = rest(*q_hit);
    for (int i = 0; i < p.k_; ++i) lead *= *q_hit;
    p.leading_ = to_double(lead);
    r.kind = p.k_ == 0 ? RegimeKind::FiniteNonCollapsing : RegimeKind::FiniteCollapsing;
    r.walls_hit = hit;
    r.semi_ample_limit = true;
  } else {
    int k = 0;
    while (p.volume_.coeff(k) == 0) ++k;
    p.k_ = k;
    p.leading_ = to_double(p.volume_.coeff(k));
    r.kind = k == 0 ? RegimeKind::InfiniteNonCollapsing : RegimeKind::InfiniteCollapsing;
    r.walls_hit = asymptotic;
  }
  r.k = p.k_;
  if (r.walls_hit.empty()) {
    r.wall = LimitWall::None;
  } else if (m.kind() == ModelKind::Hirzebruch) {
    r.wall = r.walls_hit.size() == 2 ? LimitWall::FiberAndSection
             : r.walls_hit[0] == 0   ? LimitWall::Fiber
                                     : LimitWall::Section;
  } else {
    r.wall = LimitWall::Factor;
  }
  return p;
}

double singular_time(const ClassPath& p) { return p.singular_time(); }
const RationalPolynomial& volume_polynomial(const ClassPath& p) { return p.volume_polynomial(); }
int collapse_exponent(const ClassPath& p) { return p.collapse_exponent(); }
Regime classify_regime(const ClassPath& p) { return p.regime(); }

}  // namespace krf
