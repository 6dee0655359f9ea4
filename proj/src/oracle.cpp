#include "krf/errors.hpp"
#include "krf/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace krf {

namespace {

void require_homogeneous(const ClassPath& path) {
  if (path.model().kind() == ModelKind::Hirzebruch)
    throw Unsupported("closed_form_homogeneous needs a homogeneous or flat model");
}

bool all_flat(const ClassPath& path) {
  for (const auto& f : path.model().factors())
    if (f.ricci != 0) return false;
  return true;
}

}  // namespace

double homogeneous_forcing(const ClassPath& path, double t, double calibration_time) {
  require_homogeneous(path);
  const auto c = path.coordinates_at(t);
  const auto star = path.coordinates_at(calibration_time);
  const auto& f = path.model().factors();
  double g = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) g += f[i].dim * std::log(c[i] / star[i]);
  return g;
}

double homogeneous_forcing_rate(const ClassPath& path, double t) {
  require_homogeneous(path);
  const auto c = path.coordinates_at(t);
  const auto& c0 = path.omega0_values();
  const auto& cinf = path.omega_inf_values();
  const auto& f = path.model().factors();
  const double q = std::exp(-t);
  double r = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) r += f[i].dim * (-q * (c0[i] - cinf[i])) / c[i];
  return r;
}

double closed_form_homogeneous(const ClassPath& path, double t, double calibration_time) {
  require_homogeneous(path);
  if (!(t >= 0) || t >= path.singular_time()) throw DomainError("closed_form_homogeneous: t outside [0, T)");
  if (t == 0.0) return 0.0;
  if (all_flat(path)) {
    // g(s) = -n (s - t_cal); u' = g - u, u(0) = 0.
    const double n = path.model().dimension();
    return -n * (t - 1.0 + std::exp(-t)) + n * calibration_time * (1.0 - std::exp(-t));
  }
  // u(t) = int_0^t e^{s-t} g(s) ds.
  const auto& c0 = path.omega0_values();
  const auto star = path.coordinates_at(calibration_time);
  const auto& cinf = path.omega_inf_values();
  const auto& f = path.model().factors();
  auto integrand = [&](double s) {
    const double q = std::exp(-s);
    double g = 0.0;
    for (std::size_t i = 0; i < c0.size(); ++i) g += f[i].dim * std::log((q * c0[i] + (1.0 - q) * cinf[i]) / star[i]);
    return std::exp(s - t) * g;
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, t, 20, 1e-13, &err);
}

}  // namespace krf
