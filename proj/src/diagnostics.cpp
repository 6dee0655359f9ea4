#include "krf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace krf {

Field compute_ut(const FlowState& s, const ReducedGeometry& g) {
  Field m = g.ma_log(s.u, s.t);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] -= s.u[i];
  return m;
}

Field compute_utt(const FlowState& s, const ReducedGeometry& g) {
  const Field& ut = s.ut.empty() ? compute_ut(s, g) : s.ut;
  Field lap = g.laplacian(s.u, s.t, ut);
  const auto& c0 = g.path().omega0_values();
  const auto& cinf = g.path().omega_inf_values();
  std::vector<double> diff(c0.size());
  for (std::size_t i = 0; i < c0.size(); ++i) diff[i] = c0[i] - cinf[i];
  Field tr = g.trace(s.u, s.t, diff);
  const double q = std::exp(-s.t);
  for (std::size_t i = 0; i < lap.size(); ++i) lap[i] = lap[i] - q * tr[i] - ut[i];
  return lap;
}

std::vector<char> resolved_points(const ReducedGeometry& g, const FlowState& s, const Field& utt_points) {
  const Field noise = g.to_points(g.utt_noise(s.u, s.t));
  std::vector<char> ok(noise.size());
  for (std::size_t p = 0; p < noise.size(); ++p) ok[p] = noise[p] <= 1e-2 * (std::exp(-s.t) + std::abs(utt_points[p]));
  return ok;
}

DiagnosticsRow compute_row(const ReducedGeometry& g, const FlowState& s, double dt) {
  DiagnosticsRow r;
  r.t = s.t;
  r.dt = dt;
  const double n = g.dimension();
  const double et = std::exp(s.t);
  const double T = g.singular_time();
  const Field ut_dof = s.ut.empty() ? compute_ut(s, g) : s.ut;
  FlowState full{s.t, s.u, ut_dof};
  const Field u = g.to_points(s.u);
  const Field ut = g.to_points(ut_dof);
  const Field utt = g.to_points(compute_utt(full, g));
  const Field phi = g.to_points(g.trace_w0(s.u, s.t));
  const Field logratio = g.to_points(g.log_volume_ratio_w0(s.u, s.t));
  const Field& w = g.point_weights();
  const auto resolved = resolved_points(g, full, utt);

  const double inf = std::numeric_limits<double>::infinity();
  r.min_u = inf, r.max_u = -inf, r.min_ut = inf, r.max_ut = -inf;
  r.max_et_utt_plus_ut = -inf, r.max_phi = -inf, r.max_utu = -inf, r.min_utu = inf;
  r.max_composite = -inf, r.max_essential = -inf, r.max_collapse = -inf, r.min_semiample = inf, r.amgm_min_slack = inf;
  double wsum = 0, su = 0, sut = 0, sutu = 0, seu = 0;
  int argmin = 0, nresolved = 0;
  for (std::size_t p = 0; p < u.size(); ++p) {
    if (u[p] < r.min_u) {
      r.min_u = u[p];
      argmin = static_cast<int>(p);
    }
    r.max_u = std::max(r.max_u, u[p]);
    r.min_ut = std::min(r.min_ut, ut[p]);
    r.max_ut = std::max(r.max_ut, ut[p]);
    if (resolved[p]) {
      r.max_et_utt_plus_ut = std::max(r.max_et_utt_plus_ut, et * (utt[p] + ut[p]));
      ++nresolved;
    }
    r.max_phi = std::max(r.max_phi, phi[p]);
    const double utu = ut[p] + u[p];
    r.max_utu = std::max(r.max_utu, utu);
    r.min_utu = std::min(r.min_utu, utu);
    r.max_composite = std::max(r.max_composite, (et - 1.0) * ut[p] - u[p] - n * s.t);
    r.max_essential = std::max(r.max_essential, (et - 1.0) * ut[p] - n * s.t);
    r.max_collapse = std::max(r.max_collapse, (et - 1.0) * ut[p] - u[p]);
    if (std::isfinite(T)) r.min_semiample = std::min(r.min_semiample, (1.0 - std::exp(s.t - T)) * ut[p] + u[p]);
    const double amgm = n * std::exp(logratio[p] / n);
    const double slack = (phi[p] - amgm) / phi[p];
    r.amgm_min_slack = std::min(r.amgm_min_slack, slack);
    if (slack < -1e-12) ++r.amgm_violations;
    wsum += w[p];
    su += w[p] * u[p];
    sut += w[p] * ut[p];
    sutu += w[p] * utu;
    seu += w[p] * std::exp(u[p]);
  }
  if (!std::isfinite(T)) r.min_semiample = std::numeric_limits<double>::quiet_NaN();
  r.mean_u = su / wsum;
  r.mean_ut = sut / wsum;
  r.mean_utu = sutu / wsum;
  r.integral_exp_u = seu;
  r.osc_utu = r.max_utu - r.min_utu;
  r.resolved_fraction = static_cast<double>(nresolved) / static_cast<double>(u.size());
  r.U = r.min_u;
  r.x_min = g.point_coordinate(argmin);
  r.ut_at_xmin = ut[argmin];
  r.V_cohom = g.path().volume_at(s.t);
  r.volume_quadrature = g.volume_quadrature(s.u, s.t);
  r.pos_margin = g.positivity(s.u, s.t).margin;

  const RicciData ric = g.ricci_probe(s.u, s.t);
  r.min_ricci = *std::min_element(ric.min_ratio.begin(), ric.min_ratio.end());
  r.max_scalar = *std::max_element(ric.scalar.begin(), ric.scalar.end());
  return r;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "t",       "dt",      "min_u",   "max_u",   "mean_u",   "U",        "x_min",         "min_ut",    "max_ut",
      "max_et_utt_plus_ut", "max_phi", "V_cohom", "max_utu", "min_utu", "osc_utu", "max_composite", "pos_margin"};
  return cols;
}

std::vector<double> csv_values(const DiagnosticsRow& r) {
  return {r.t,       r.dt,      r.min_u,   r.max_u,   r.mean_u,  r.U,       r.x_min,         r.min_ut,    r.max_ut,
          r.max_et_utt_plus_ut, r.max_phi, r.V_cohom, r.max_utu, r.min_utu, r.osc_utu, r.max_composite, r.pos_margin};
}

}  // namespace krf
