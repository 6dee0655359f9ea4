#include "krf/geometry.hpp"

#include "krf/errors.hpp"
#include "krf/geometry_backends.hpp"

#include <cmath>

namespace krf {

std::string to_string(BackendKind k) {
  switch (k) {
    case BackendKind::Calabi: return "calabi";
    case BackendKind::Torus: return "torus";
    case BackendKind::Homogeneous: return "homogeneous";
  }
  return {};
}

ReducedGeometry::ReducedGeometry(ClassPath path, const BackendSettings& settings)
    : path_(std::move(path)), settings_(settings) {
  if (!(settings_.positivity_floor > 0)) throw ConfigError("positivity floor must be positive");
  if (settings_.calibration_time < 0 || settings_.calibration_time >= path_.singular_time())
    throw ConfigError("calibration time must lie in [0, T)");
}

void ReducedGeometry::require_before_singular(double t, const char* op) const {
  if (!(t >= 0) || t >= singular_time())
    throw DomainError(std::string(op) + ": time " + std::to_string(t) + " outside [0, T)");
}

Field ReducedGeometry::trace_w0(const Field& u, double t) const { return trace(u, t, path_.omega0_values()); }

Field ReducedGeometry::utt_noise(const Field&, double) const { return Field(dof(), 0.0); }

RicciData ReducedGeometry::ricci_probe(const Field&, double) const {
  throw Unsupported("ricci_probe is not available on the " + to_string(kind()) + " backend");
}

Field ReducedGeometry::divisor_log_sigma() const {
  throw Unsupported("divisor_log_sigma is only defined on the Calabi backend");
}

BackendKind default_backend(const ModelGeometry& m) {
  switch (m.kind()) {
    case ModelKind::Hirzebruch: return BackendKind::Calabi;
    case ModelKind::TorusSeparable: return BackendKind::Torus;
    default: return BackendKind::Homogeneous;
  }
}

std::shared_ptr<const ReducedGeometry> make_geometry(const ClassPath& path, const BackendSettings& settings) {
  switch (default_backend(path.model())) {
    case BackendKind::Calabi: return std::make_shared<CalabiGeometry>(path, settings);
    case BackendKind::Torus: return std::make_shared<TorusGeometry>(path, settings);
    case BackendKind::Homogeneous: return std::make_shared<HomogeneousGeometry>(path, settings);
  }
  throw ConfigError("no backend for model " + path.model().spec());
}

std::pair<double, double> calabi_slopes(int a, double x, double y) {
  // Fibre area b1 - b0 = x; the two sections have areas a*b0 = y - a x and a*b1 = y.
  return {(y - a * x) / a, y / a};
}

}  // namespace krf
