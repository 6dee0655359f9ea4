#pragma once

#include "krf/cohomology.hpp"
#include "krf/grid.hpp"
#include "krf/kernels.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace krf {

/// Nodal values in a backend's degree-of-freedom space. For the separable
/// torus backend the dof vector stacks one block per factor and the value of
/// the field at a point of X is the sum of the blocks.
using Field = std::vector<double>;

struct PotentialField {
  Field values;
  double t = 0.0;
};

struct PositivityCheck {
  bool ok = false;
  /// Smallest eigen-coefficient of the evolving form relative to the
  /// calibration form.
  double margin = 0.0;
};

/// Eigenvalues of the evolving form relative to omega_0, per point of X.
struct EigenRange {
  Field min;
  Field max;
};

/// Ricci data of the evolving metric on the points where it is defined.
struct RicciData {
  std::vector<int> points;
  Field min_ratio;  // smallest eigenvalue of Ric against the metric
  Field scalar;     // scalar curvature R
};

enum class BackendKind { Calabi, Torus, Homogeneous };
std::string to_string(BackendKind k);

struct BackendSettings {
  LineGridSpec line;                 // Calabi
  int torus_nodes = 256;             // Torus, per factor
  double torus_period = 1.0;
  double torus_ripple = 0.0;         // g_i(x) = c_i (1 + ripple cos(2 pi x / L))
  double calibration_time = 0.0;     // Omega = (reference form at this time)^n
  double positivity_floor = 1e-12;
  kernels::Exec exec = kernels::Exec::Parallel;
};

/// Reduced geometry for one class path. Immutable after construction.
class ReducedGeometry {
 public:
  explicit ReducedGeometry(ClassPath path, const BackendSettings& settings);
  virtual ~ReducedGeometry() = default;

  const ClassPath& path() const { return path_; }
  const BackendSettings& settings() const { return settings_; }
  int dimension() const { return path_.model().dimension(); }
  double singular_time() const { return path_.singular_time(); }

  virtual BackendKind kind() const = 0;
  virtual int dof() const = 0;
  virtual int points() const = 0;
  virtual Field to_points(const Field& f) const = 0;
  /// Quadrature weights of Omega at the points of X (they sum to ~[omega_0]^n).
  virtual const Field& point_weights() const = 0;
  /// Spatial coordinate of a point (rho for Calabi, first-factor x for torus).
  virtual double point_coordinate(int p) const = 0;

  virtual Field reference_potential(double t) const = 0;
  virtual PositivityCheck positivity(const Field& u, double t) const = 0;
  /// log((omega_t + i ddbar u)^n / Omega).
  virtual Field ma_log(const Field& u, double t) const = 0;
  /// Laplacian of v with respect to omega_t + i ddbar u.
  virtual Field laplacian(const Field& u, double t, const Field& v) const = 0;
  /// Derivative of ma_log in u; applying it to v gives laplacian(u, t, v).
  virtual Eigen::SparseMatrix<double> linearization(const Field& u, double t) const = 0;
  /// Trace of the reference representative of the class `coords` against the evolving form.
  virtual Field trace(const Field& u, double t, const std::vector<double>& coords) const = 0;
  Field trace_w0(const Field& u, double t) const;
  /// log(omega_0^n / (omega_t + i ddbar u)^n).
  virtual Field log_volume_ratio_w0(const Field& u, double t) const = 0;
  virtual EigenRange eigen_range_w0(const Field& u, double t) const = 0;
  /// Grid quadrature of (omega_t + i ddbar u)^n.
  virtual double volume_quadrature(const Field& u, double t) const = 0;

  /// Floating-point noise floor of the spatial second time derivative per dof
  /// (zero where the backend is uniformly well conditioned).
  virtual Field utt_noise(const Field& u, double t) const;

  virtual RicciData ricci_probe(const Field& u, double t) const;
  virtual Field divisor_log_sigma() const;

  /// Backend-specific reduced coordinate names for reports.
  virtual std::string describe() const = 0;

 protected:
  void require_before_singular(double t, const char* op) const;

  ClassPath path_;
  BackendSettings settings_;
};

BackendKind default_backend(const ModelGeometry& m);
std::shared_ptr<const ReducedGeometry> make_geometry(const ClassPath& path, const BackendSettings& settings);

/// Endpoint slopes (b0, b1) of the Calabi potential for a Hirzebruch class (x, y).
std::pair<double, double> calabi_slopes(int a, double x, double y);

/// Scalar flow for spatially constant potentials on homogeneous and flat models.
double closed_form_homogeneous(const ClassPath& path, double t, double calibration_time = 0.0);
/// Right-hand side g(t) = sum_i d_i log(a_i(t) / a_i(calibration)) and its derivative.
double homogeneous_forcing(const ClassPath& path, double t, double calibration_time = 0.0);
double homogeneous_forcing_rate(const ClassPath& path, double t);

}  // namespace krf
