#include "krf/errors.hpp"
#include "krf/geometry_backends.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace krf {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

CalabiGeometry::CalabiGeometry(ClassPath path, const BackendSettings& settings)
    : ReducedGeometry(std::move(path), settings), grid_(Grid1D::truncated_line(settings.line)) {
  if (path_.model().kind() != ModelKind::Hirzebruch)
    throw ConfigError("Calabi backend needs a Hirzebruch model, got " + path_.model().spec());
  a_ = path_.model().hirzebruch_degree();
  class_profile(path_.coordinates_at(settings_.calibration_time), star1_, star2_);
  class_profile(path_.omega0_values(), init1_, init2_);
  omega_weights_.resize(grid_.size());
  for (int i = 0; i < grid_.size(); ++i) omega_weights_[i] = grid_.weights()[i] * 2.0 * a_ * star1_[i] * star2_[i];
}

void CalabiGeometry::class_profile(const std::vector<double>& coords, Field& d1, Field& d2) const {
  const auto [b0, b1] = calabi_slopes(a_, coords[0], coords[1]);
  const auto& sp = grid_.sigma_plus();
  const auto& sm = grid_.sigma_minus();
  const int n = grid_.size();
  d1.resize(n);
  d2.resize(n);
  for (int i = 0; i < n; ++i) {
    d1[i] = b0 * sm[i] + b1 * sp[i];
    d2[i] = (b1 - b0) * sp[i] * sm[i];
  }
}

void CalabiGeometry::metric(const Field& u, double t, Field& d1, Field& d2) const {
  Field r1, r2;
  class_profile(path_.coordinates_at(t), r1, r2);
  const int n = grid_.size();
  Field u1(n), u2(n);
  kernels::derivatives(settings_.exec, grid_, u, u1, u2);
  d1.resize(n);
  d2.resize(n);
  kernels::add_fields(settings_.exec, r1, r2, u1, u2, d1, d2);
}

Field CalabiGeometry::reference_potential(double t) const {
  require_before_singular(t, "reference_potential");
  const auto c = path_.coordinates_at(t);
  const auto [b0, b1] = calabi_slopes(a_, c[0], c[1]);
  Field psi(grid_.size());
  for (int i = 0; i < grid_.size(); ++i) psi[i] = b0 * grid_.node(i) + (b1 - b0) * softplus(grid_.node(i));
  return psi;
}

PositivityCheck CalabiGeometry::positivity(const Field& u, double t) const {
  Field p1, p2;
  metric(u, t, p1, p2);
  double margin = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (int i = 0; i < grid_.size(); ++i) {
    const double r = std::min(p1[i] / star1_[i], p2[i] / star2_[i]);
    if (!std::isfinite(r)) finite = false;
    margin = std::min(margin, r);
  }
  return {finite && margin > settings_.positivity_floor, finite ? margin : -std::numeric_limits<double>::infinity()};
}

Field CalabiGeometry::ma_log(const Field& u, double t) const {
  Field p1, p2;
  metric(u, t, p1, p2);
  for (int i = 0; i < grid_.size(); ++i)
    if (!(p1[i] / star1_[i] > settings_.positivity_floor) || !(p2[i] / star2_[i] > settings_.positivity_floor))
      throw PositivityBreakdown("ma_log: metric degenerate at rho = " + std::to_string(grid_.node(i)));
  Field out(grid_.size());
  kernels::log_ratio2(settings_.exec, p1, p2, star1_, star2_, out);
  return out;
}

Field CalabiGeometry::laplacian(const Field& u, double t, const Field& v) const {
  Field p1, p2;
  metric(u, t, p1, p2);
  const int n = grid_.size();
  Field c1(n), c2(n), out(n);
  for (int i = 0; i < n; ++i) {
    if (!(p1[i] > 0) || !(p2[i] > 0)) throw PositivityBreakdown("laplacian: metric degenerate");
    c1[i] = 1.0 / p1[i];
    c2[i] = 1.0 / p2[i];
  }
  kernels::apply_operator(settings_.exec, grid_, c1, c2, v, out);
  return out;
}

Eigen::SparseMatrix<double> CalabiGeometry::linearization(const Field& u, double t) const {
  Field p1, p2;
  metric(u, t, p1, p2);
  const int n = grid_.size();
  Field c1(n), c2(n), vals(4 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    c1[i] = 1.0 / p1[i];
    c2[i] = 1.0 / p2[i];
  }
  kernels::operator_rows(settings_.exec, grid_, c1, c2, vals);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& r = grid_.stencil()[i];
    for (int k = 0; k < r.count; ++k) trip.emplace_back(i, r.col[k], vals[4 * i + k]);
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Field CalabiGeometry::trace(const Field& u, double t, const std::vector<double>& coords) const {
  Field p1, p2, q1, q2;
  metric(u, t, p1, p2);
  class_profile(coords, q1, q2);
  Field out(grid_.size());
  kernels::trace2(settings_.exec, q1, q2, p1, p2, out);
  return out;
}

Field CalabiGeometry::log_volume_ratio_w0(const Field& u, double t) const {
  Field p1, p2;
  metric(u, t, p1, p2);
  Field out(grid_.size());
  kernels::log_ratio2(settings_.exec, init1_, init2_, p1, p2, out);
  return out;
}

EigenRange CalabiGeometry::eigen_range_w0(const Field& u, double t) const {
  Field p1, p2;
  metric(u, t, p1, p2);
  EigenRange r;
  r.min.resize(grid_.size());
  r.max.resize(grid_.size());
  for (int i = 0; i < grid_.size(); ++i) {
    const double l1 = p1[i] / init1_[i], l2 = p2[i] / init2_[i];
    r.min[i] = std::min(l1, l2);
    r.max[i] = std::max(l1, l2);
  }
  return r;
}

double CalabiGeometry::volume_quadrature(const Field& u, double t) const {
  Field p1, p2;
  metric(u, t, p1, p2);
  double acc = 0.0;
  for (int i = 0; i < grid_.size(); ++i) acc += grid_.weights()[i] * 2.0 * a_ * p1[i] * p2[i];
  return acc;
}

Field CalabiGeometry::utt_noise(const Field& u, double t) const {
  // Roundoff in u is amplified once by ma_log (giving u_t) and once more by the Laplacian.
  constexpr double eps = std::numeric_limits<double>::epsilon();
  Field p1, p2;
  metric(u, t, p1, p2);
  const int n = grid_.size();
  auto amplify = [&](const Field& f) {
    Field out(n);
    for (int i = 0; i < n; ++i) {
      const auto& r = grid_.stencil()[i];
      double acc = 0.0;
      for (int k = 0; k < r.count; ++k) acc += (std::abs(r.d1[k]) / p1[i] + std::abs(r.d2[k]) / p2[i]) * f[r.col[k]];
      out[i] = acc;
    }
    return out;
  };
  Field mag(n);
  for (int i = 0; i < n; ++i) mag[i] = 4.0 * eps * (1.0 + std::abs(u[i]));
  Field ut_noise = amplify(mag);
  for (int i = 0; i < n; ++i) ut_noise[i] += mag[i];
  return amplify(ut_noise);
}

RicciData CalabiGeometry::ricci_probe(const Field& u, double t) const {
  // Ric = 2 omega_base - i ddbar log(psi' psi''), the base P^1 having unit area.
  // Points where the roundoff of u, carried through two stencils, exceeds 1% are dropped.
  constexpr double eps = std::numeric_limits<double>::epsilon();
  Field p1, p2;
  metric(u, t, p1, p2);
  const int n = grid_.size();
  const auto& sp = grid_.sigma_plus();
  const auto& sm = grid_.sigma_minus();
  // log(psi' psi'') = log psi' + log(psi'' / (sp sm)) + log(sp sm); the last term is differentiated exactly.
  Field logdet(n), l1(n), l2(n), dlog(n);
  for (int i = 0; i < n; ++i) {
    logdet[i] = std::log(p1[i]) + std::log(p2[i] / (sp[i] * sm[i]));
    const auto& r = grid_.stencil()[i];
    double e1 = 0.0, e2 = 0.0;
    for (int k = 0; k < r.count; ++k) {
      const double m = 4.0 * eps * (1.0 + std::abs(u[r.col[k]]));
      e1 += std::abs(r.d1[k]) * m, e2 += std::abs(r.d2[k]) * m;
    }
    dlog[i] = e1 / p1[i] + e2 / p2[i] + 4.0 * eps * (1.0 + std::abs(logdet[i]));
  }
  kernels::derivatives(settings_.exec, grid_, logdet, l1, l2);
  for (int i = 0; i < n; ++i) l1[i] += sm[i] - sp[i], l2[i] -= 2.0 * sp[i] * sm[i];
  RicciData r;
  for (int i = 1; i + 1 < n; ++i) {
    const double base = (2.0 - a_ * l1[i]) / (a_ * p1[i]);
    const double fibre = -l2[i] / p2[i];
    const auto& row = grid_.stencil()[i];
    double n1 = 0.0, n2 = 0.0;
    for (int k = 0; k < row.count; ++k) n1 += std::abs(row.d1[k]) * dlog[row.col[k]], n2 += std::abs(row.d2[k]) * dlog[row.col[k]];
    if (n1 / p1[i] > 1e-2 * std::max(1.0, std::abs(base)) || n2 / p2[i] > 1e-2 * std::max(1.0, std::abs(fibre))) continue;
    r.points.push_back(i);
    r.min_ratio.push_back(std::min(base, fibre));
    r.scalar.push_back(base + fibre);
  }
  return r;
}

Field CalabiGeometry::divisor_log_sigma() const {
  Field out(grid_.size());
  for (int i = 0; i < grid_.size(); ++i) out[i] = -softplus(-grid_.node(i));
  return out;
}

std::string CalabiGeometry::describe() const {
  std::ostringstream os;
  os << "calabi(a=" << a_ << ", N=" << grid_.size() << ", R=" << grid_.extent() << ", " << to_string(grid_.spacing())
     << ")";
  return os.str();
}

}  // namespace krf
