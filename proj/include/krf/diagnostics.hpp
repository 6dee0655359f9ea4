#pragma once

#include "krf/geometry.hpp"

#include <string>
#include <vector>

namespace krf {

struct FlowState {
  double t = 0.0;
  Field u;
  Field ut;  // cached exact time derivative ma_log(u, t) - u
};

/// Exact time derivative from the flow equation (no time differencing).
Field compute_ut(const FlowState& s, const ReducedGeometry& g);
/// Second time derivative from spatial data:
/// u_tt = Laplacian(u_t) - e^{-t} <omega~, omega_0 - omega_inf> - u_t.
Field compute_utt(const FlowState& s, const ReducedGeometry& g);

/// Per-snapshot scalars. All extrema are over the points of X.
struct DiagnosticsRow {
  double t = 0, dt = 0;
  double min_u = 0, max_u = 0, mean_u = 0;
  double U = 0, x_min = 0;  // U(t) = min u, attained at x_min
  double min_ut = 0, max_ut = 0, mean_ut = 0;
  double max_et_utt_plus_ut = 0;  // max e^t (u_tt + u_t) over resolved points
  double resolved_fraction = 1;   // share of points where u_tt is above its roundoff floor
  double max_phi = 0;             // max <omega~, omega_0>
  double V_cohom = 0;
  double max_utu = 0, min_utu = 0, osc_utu = 0, mean_utu = 0;  // u_t + u
  double max_composite = 0;  // max (e^t - 1) u_t - u - n t
  double max_essential = 0;  // max (e^t - 1) u_t - n t
  double max_collapse = 0;   // max (e^t - 1) u_t - u
  double min_semiample = 0;  // min (1 - e^{t-T}) u_t + u (finite T only)
  double ut_at_xmin = 0;
  double min_ricci = 0, max_scalar = 0;
  double volume_quadrature = 0;
  double integral_exp_u = 0;  // int e^u Omega
  double pos_margin = 0;
  int amgm_violations = 0;
  double amgm_min_slack = 0;  // min (phi - n (omega_0^n / omega~^n)^{1/n}) / phi
};

/// Points where e^t u_tt exceeds its roundoff floor by two digits.
std::vector<char> resolved_points(const ReducedGeometry& g, const FlowState& s, const Field& utt_points);

DiagnosticsRow compute_row(const ReducedGeometry& g, const FlowState& s, double dt);

/// CSV header, in the documented column order.
const std::vector<std::string>& csv_columns();
std::vector<double> csv_values(const DiagnosticsRow& r);

}  // namespace krf
