#pragma once

#include "krf/geometry.hpp"

namespace krf {

/// Calabi ansatz on a Hirzebruch surface: omega = i ddbar psi(rho) with
/// rho = log|z|^2_h on the fibres. In the frame (base, fibre) the metric has
/// eigen-coefficients (a psi', psi'') and omega^2 = 2a psi' psi'' dvol.
class CalabiGeometry final : public ReducedGeometry {
 public:
  CalabiGeometry(ClassPath path, const BackendSettings& settings);

  BackendKind kind() const override { return BackendKind::Calabi; }
  int dof() const override { return grid_.size(); }
  int points() const override { return grid_.size(); }
  Field to_points(const Field& f) const override { return f; }
  const Field& point_weights() const override { return omega_weights_; }
  double point_coordinate(int p) const override { return grid_.node(p); }

  Field reference_potential(double t) const override;
  PositivityCheck positivity(const Field& u, double t) const override;
  Field ma_log(const Field& u, double t) const override;
  Field laplacian(const Field& u, double t, const Field& v) const override;
  Eigen::SparseMatrix<double> linearization(const Field& u, double t) const override;
  Field trace(const Field& u, double t, const std::vector<double>& coords) const override;
  Field log_volume_ratio_w0(const Field& u, double t) const override;
  EigenRange eigen_range_w0(const Field& u, double t) const override;
  double volume_quadrature(const Field& u, double t) const override;
  Field utt_noise(const Field& u, double t) const override;
  RicciData ricci_probe(const Field& u, double t) const override;
  Field divisor_log_sigma() const override;
  std::string describe() const override;

  const Grid1D& grid() const { return grid_; }
  /// (psi', psi'') of the reference representative of a class.
  void class_profile(const std::vector<double>& coords, Field& d1, Field& d2) const;
  /// (psi', psi'') of omega_t + i ddbar u.
  void metric(const Field& u, double t, Field& d1, Field& d2) const;

 private:
  Grid1D grid_;
  int a_;
  Field star1_, star2_, init1_, init2_, omega_weights_;
};

/// Flat torus T^n = product of elliptic curves with potentials separable in
/// the real coordinates: u = sum_i u_i(x_i, t). Factor i has metric
/// coefficient (coords_i(t) / coords_i(0)) g_i(x_i) + u_i''.
class TorusGeometry final : public ReducedGeometry {
 public:
  TorusGeometry(ClassPath path, const BackendSettings& settings);

  BackendKind kind() const override { return BackendKind::Torus; }
  int dof() const override { return factors_ * grid_.size(); }
  int points() const override { return points_; }
  Field to_points(const Field& f) const override;
  const Field& point_weights() const override { return omega_weights_; }
  double point_coordinate(int p) const override { return grid_.node(p % grid_.size()); }

  Field reference_potential(double t) const override;
  PositivityCheck positivity(const Field& u, double t) const override;
  Field ma_log(const Field& u, double t) const override;
  Field laplacian(const Field& u, double t, const Field& v) const override;
  Eigen::SparseMatrix<double> linearization(const Field& u, double t) const override;
  Field trace(const Field& u, double t, const std::vector<double>& coords) const override;
  Field log_volume_ratio_w0(const Field& u, double t) const override;
  EigenRange eigen_range_w0(const Field& u, double t) const override;
  double volume_quadrature(const Field& u, double t) const override;
  RicciData ricci_probe(const Field& u, double t) const override;
  std::string describe() const override;

  const Grid1D& grid() const { return grid_; }
  int factors() const { return factors_; }

 private:
  /// Per-dof metric coefficient of each factor.
  Field coefficients(const Field& u, double t) const;
  Field base_coefficients(double t) const;
  /// Combine per-factor block values at every point of X with `op`.
  template <class Op>
  Field combine(const Field& blocks, Op op) const;

  Grid1D grid_;
  int factors_;
  int points_;
  Field g_, star_, omega_weights_;
};

/// Spatially constant potentials on products of Kähler–Einstein factors
/// (projective spaces, curves, flat tori). One degree of freedom.
class HomogeneousGeometry final : public ReducedGeometry {
 public:
  HomogeneousGeometry(ClassPath path, const BackendSettings& settings);

  BackendKind kind() const override { return BackendKind::Homogeneous; }
  int dof() const override { return 1; }
  int points() const override { return 1; }
  Field to_points(const Field& f) const override { return f; }
  const Field& point_weights() const override { return omega_weights_; }
  double point_coordinate(int) const override { return 0.0; }

  /// Class coordinates a_i(t) of the reference form.
  Field reference_potential(double t) const override;
  PositivityCheck positivity(const Field& u, double t) const override;
  Field ma_log(const Field& u, double t) const override;
  Field laplacian(const Field& u, double t, const Field& v) const override;
  Eigen::SparseMatrix<double> linearization(const Field& u, double t) const override;
  Field trace(const Field& u, double t, const std::vector<double>& coords) const override;
  Field log_volume_ratio_w0(const Field& u, double t) const override;
  EigenRange eigen_range_w0(const Field& u, double t) const override;
  double volume_quadrature(const Field& u, double t) const override;
  RicciData ricci_probe(const Field& u, double t) const override;
  std::string describe() const override;

 private:
  std::vector<double> star_;
  Field omega_weights_;
};

}  // namespace krf
