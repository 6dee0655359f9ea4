#include "krf/errors.hpp"
#include "krf/geometry_backends.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace krf {

TorusGeometry::TorusGeometry(ClassPath path, const BackendSettings& settings)
    : ReducedGeometry(std::move(path), settings),
      grid_(Grid1D::periodic(settings.torus_nodes, settings.torus_period)) {
  const auto& m = path_.model();
  if (m.kind() == ModelKind::Hirzebruch) throw ConfigError("torus backend needs a product of curves");
  for (const auto& f : m.factors())
    if (f.dim != 1 || f.ricci != 0) throw ConfigError("torus backend needs flat one-dimensional factors");
  if (std::abs(settings.torus_ripple) >= 1) throw ConfigError("torus ripple must satisfy |ripple| < 1");
  factors_ = static_cast<int>(m.factors().size());
  const int n = grid_.size();
  double count = 1.0;
  for (int i = 0; i < factors_; ++i) count *= n;
  if (count > 4.2e6) throw ConfigError("torus point enumeration too large; reduce nodes or dimension");
  points_ = static_cast<int>(count);

  const auto c0 = path_.omega0_values();
  g_.resize(static_cast<std::size_t>(dof()));
  for (int f = 0; f < factors_; ++f)
    for (int i = 0; i < n; ++i)
      g_[f * n + i] =
          c0[f] * (1.0 + settings.torus_ripple * std::cos(2.0 * std::numbers::pi * grid_.node(i) / grid_.extent()));
  star_ = base_coefficients(settings_.calibration_time);

  // Omega = n! prod_i star_i(x_i) dx_i / L, normalized so that [omega]^n = n! prod c_i.
  Field logw(static_cast<std::size_t>(dof()));
  for (int f = 0; f < factors_; ++f)
    for (int i = 0; i < n; ++i) logw[f * n + i] = std::log(star_[f * n + i] * grid_.weights()[i] / grid_.extent());
  omega_weights_ = combine(logw, [](double acc, double v) { return acc + v; });
  double fact = 1.0;
  for (int i = 2; i <= factors_; ++i) fact *= i;
  for (auto& w : omega_weights_) w = fact * std::exp(w);
}

template <class Op>
Field TorusGeometry::combine(const Field& blocks, Op op) const {
  const int n = grid_.size();
  Field out(static_cast<std::size_t>(points_));
  // Point index p = i_0 + n i_1 + n^2 i_2 + ...
  for (int p = 0; p < points_; ++p) {
    int rem = p;
    double acc = blocks[rem % n];
    rem /= n;
    for (int f = 1; f < factors_; ++f) {
      acc = op(acc, blocks[f * n + rem % n]);
      rem /= n;
    }
    out[p] = acc;
  }
  return out;
}

Field TorusGeometry::to_points(const Field& f) const {
  return combine(f, [](double acc, double v) { return acc + v; });
}

Field TorusGeometry::base_coefficients(double t) const {
  const auto ct = path_.coordinates_at(t);
  const auto c0 = path_.omega0_values();
  const int n = grid_.size();
  Field b(static_cast<std::size_t>(dof()));
  for (int f = 0; f < factors_; ++f)
    for (int i = 0; i < n; ++i) b[f * n + i] = ct[f] / c0[f] * g_[f * n + i];
  return b;
}

Field TorusGeometry::coefficients(const Field& u, double t) const {
  Field a = base_coefficients(t);
  const int n = grid_.size();
  Field d1(n), d2(n);
  for (int f = 0; f < factors_; ++f) {
    std::span<const double> uf(u.data() + f * n, n);
    kernels::derivatives(settings_.exec, grid_, uf, d1, d2);
    for (int i = 0; i < n; ++i) a[f * n + i] += d2[i];
  }
  return a;
}

Field TorusGeometry::reference_potential(double t) const {
  require_before_singular(t, "reference_potential");
  return base_coefficients(t);
}

PositivityCheck TorusGeometry::positivity(const Field& u, double t) const {
  const Field a = coefficients(u, t);
  double margin = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = a[i] / star_[i];
    if (!std::isfinite(r)) finite = false;
    margin = std::min(margin, r);
  }
  return {finite && margin > settings_.positivity_floor, finite ? margin : -std::numeric_limits<double>::infinity()};
}

Field TorusGeometry::ma_log(const Field& u, double t) const {
  const Field a = coefficients(u, t);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] / star_[i] > settings_.positivity_floor)) throw PositivityBreakdown("ma_log: torus metric degenerate");
  Field out(a.size());
  kernels::log_ratio(settings_.exec, a, star_, out);
  return out;
}

Field TorusGeometry::laplacian(const Field& u, double t, const Field& v) const {
  const Field a = coefficients(u, t);
  const int n = grid_.size();
  Field out(a.size()), d1(n), d2(n);
  for (int f = 0; f < factors_; ++f) {
    std::span<const double> vf(v.data() + f * n, n);
    kernels::derivatives(settings_.exec, grid_, vf, d1, d2);
    for (int i = 0; i < n; ++i) out[f * n + i] = d2[i] / a[f * n + i];
  }
  return out;
}

Eigen::SparseMatrix<double> TorusGeometry::linearization(const Field& u, double t) const {
  const Field a = coefficients(u, t);
  const int n = grid_.size();
  std::vector<Eigen::Triplet<double>> trip;
  for (int f = 0; f < factors_; ++f)
    for (int i = 0; i < n; ++i) {
      const auto& r = grid_.stencil()[i];
      for (int k = 0; k < r.count; ++k) trip.emplace_back(f * n + i, f * n + r.col[k], r.d2[k] / a[f * n + i]);
    }
  Eigen::SparseMatrix<double> m(dof(), dof());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Field TorusGeometry::trace(const Field& u, double t, const std::vector<double>& coords) const {
  const Field a = coefficients(u, t);
  const auto c0 = path_.omega0_values();
  const int n = grid_.size();
  Field out(a.size());
  for (int f = 0; f < factors_; ++f)
    for (int i = 0; i < n; ++i) out[f * n + i] = coords[f] / c0[f] * g_[f * n + i] / a[f * n + i];
  return out;
}

Field TorusGeometry::log_volume_ratio_w0(const Field& u, double t) const {
  const Field a = coefficients(u, t);
  Field out(a.size());
  kernels::log_ratio(settings_.exec, g_, a, out);
  return out;
}

EigenRange TorusGeometry::eigen_range_w0(const Field& u, double t) const {
  const Field a = coefficients(u, t);
  Field ratio(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) ratio[i] = a[i] / g_[i];
  return {combine(ratio, [](double x, double y) { return std::min(x, y); }),
          combine(ratio, [](double x, double y) { return std::max(x, y); })};
}

double TorusGeometry::volume_quadrature(const Field& u, double t) const {
  const Field a = coefficients(u, t);
  const int n = grid_.size();
  double v = 1.0;
  for (int f = 0; f < factors_; ++f) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += grid_.weights()[i] * a[f * n + i];
    v *= (f + 1) * s / grid_.extent();
  }
  return v;
}

RicciData TorusGeometry::ricci_probe(const Field& u, double t) const {
  const Field a = coefficients(u, t);
  const int n = grid_.size();
  Field eig(a.size()), d1(n), d2(n), la(n);
  for (int f = 0; f < factors_; ++f) {
    for (int i = 0; i < n; ++i) la[i] = std::log(a[f * n + i]);
    kernels::derivatives(settings_.exec, grid_, la, d1, d2);
    for (int i = 0; i < n; ++i) eig[f * n + i] = -d2[i] / a[f * n + i];
  }
  RicciData r;
  r.min_ratio = combine(eig, [](double x, double y) { return std::min(x, y); });
  r.scalar = to_points(eig);
  r.points.resize(static_cast<std::size_t>(points_));
  for (int p = 0; p < points_; ++p) r.points[p] = p;
  return r;
}

std::string TorusGeometry::describe() const {
  std::ostringstream os;
  os << "torus(n=" << factors_ << ", N=" << grid_.size() << ", L=" << grid_.extent()
     << ", ripple=" << settings_.torus_ripple << ")";
  return os.str();
}

}  // namespace krf
