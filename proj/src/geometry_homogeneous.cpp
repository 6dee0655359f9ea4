#include "krf/errors.hpp"
#include "krf/geometry_backends.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace krf {

HomogeneousGeometry::HomogeneousGeometry(ClassPath path, const BackendSettings& settings)
    : ReducedGeometry(std::move(path), settings) {
  if (path_.model().kind() == ModelKind::Hirzebruch)
    throw ConfigError("homogeneous backend needs a product of Kähler–Einstein factors");
  star_ = path_.coordinates_at(settings_.calibration_time);
  omega_weights_ = {path_.volume_at(settings_.calibration_time)};
}

Field HomogeneousGeometry::reference_potential(double t) const {
  require_before_singular(t, "reference_potential");
  return path_.coordinates_at(t);
}

PositivityCheck HomogeneousGeometry::positivity(const Field&, double t) const {
  const auto c = path_.coordinates_at(t);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.size(); ++i) margin = std::min(margin, c[i] / star_[i]);
  return {margin > settings_.positivity_floor, margin};
}

Field HomogeneousGeometry::ma_log(const Field&, double t) const {
  const auto c = path_.coordinates_at(t);
  const auto& f = path_.model().factors();
  double v = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] / star_[i] > settings_.positivity_floor)) throw PositivityBreakdown("ma_log: class left the cone");
    v += f[i].dim * std::log(c[i] / star_[i]);
  }
  return {v};
}

Field HomogeneousGeometry::laplacian(const Field&, double, const Field&) const { return {0.0}; }

Eigen::SparseMatrix<double> HomogeneousGeometry::linearization(const Field&, double) const {
  Eigen::SparseMatrix<double> m(1, 1);
  m.insert(0, 0) = 0.0;
  return m;
}

Field HomogeneousGeometry::trace(const Field&, double t, const std::vector<double>& coords) const {
  const auto c = path_.coordinates_at(t);
  const auto& f = path_.model().factors();
  double v = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) v += f[i].dim * coords[i] / c[i];
  return {v};
}

Field HomogeneousGeometry::log_volume_ratio_w0(const Field&, double t) const {
  const auto c = path_.coordinates_at(t);
  const auto c0 = path_.omega0_values();
  const auto& f = path_.model().factors();
  double v = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) v += f[i].dim * std::log(c0[i] / c[i]);
  return {v};
}

EigenRange HomogeneousGeometry::eigen_range_w0(const Field&, double t) const {
  const auto c = path_.coordinates_at(t);
  const auto c0 = path_.omega0_values();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < c.size(); ++i) {
    lo = std::min(lo, c[i] / c0[i]);
    hi = std::max(hi, c[i] / c0[i]);
  }
  return {{lo}, {hi}};
}

double HomogeneousGeometry::volume_quadrature(const Field&, double t) const {
  return path_.model().volume(path_.coordinates_at(t));
}

RicciData HomogeneousGeometry::ricci_probe(const Field&, double t) const {
  // Ric(c_i omega_i) = ricci_i omega_i, so the eigenvalue against the metric is ricci_i / c_i.
  const auto c = path_.coordinates_at(t);
  const auto& f = path_.model().factors();
  double lo = std::numeric_limits<double>::infinity(), scalar = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    lo = std::min(lo, f[i].ricci / c[i]);
    scalar += f[i].dim * f[i].ricci / c[i];
  }
  return {{0}, {lo}, {scalar}};
}

std::string HomogeneousGeometry::describe() const {
  std::ostringstream os;
  os << "homogeneous(" << path_.model().spec() << ")";
  return os.str();
}

}  // namespace krf
