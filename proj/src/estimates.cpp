#include "krf/estimates.hpp"

#include "krf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace krf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<double, 3> kLadder = {1.0, 2.0, 4.0};
constexpr std::array<double, 5> kSchwarzGrid = {0.5, 1.0, 2.0, 4.0, 8.0};
constexpr std::array<double, 5> kSandwichGrid = {0.25, 0.5, 1.0, 2.0, 4.0};
constexpr std::array<double, 3> kInterpolationFractions = {0.25, 0.5, 0.75};

void require_snapshots(const Trajectory& tr, const char* op) {
  if (static_cast<int>(tr.snapshots.size()) < kMinSnapshots)
    throw DiagnosticError(std::string(op) + ": needs at least " + std::to_string(kMinSnapshots) + " snapshots, got " +
                          std::to_string(tr.snapshots.size()));
}

bool finite_T(const Trajectory& tr) { return tr.geometry->path().finite_time(); }

bool collapsing(const Trajectory& tr) {
  const auto k = tr.geometry->path().regime().kind;
  return k == RegimeKind::FiniteCollapsing || k == RegimeKind::InfiniteCollapsing;
}

/// Log-rate variable: log(T - t) for finite T, -t otherwise.
double rate_variable(const Trajectory& tr, double t) {
  return finite_T(tr) ? std::log(tr.geometry->singular_time() - t) : -t;
}

/// Snapshot indices of the asymptotic window: the last decade of T - t, or the last half in t.
std::vector<std::size_t> fit_window(const Trajectory& tr) {
  std::vector<std::size_t> idx;
  const double t_last = tr.final_time();
  if (finite_T(tr)) {
    const double T = tr.geometry->singular_time();
    const double lo = std::log(T - t_last) + std::log(10.0);
    for (std::size_t j = 0; j < tr.rows.size(); ++j)
      if (std::log(T - tr.rows[j].t) <= lo * (1.0 - 1e-12) + 1e-12 * std::abs(lo)) idx.push_back(j);
  } else {
    for (std::size_t j = 0; j < tr.rows.size(); ++j)
      if (tr.rows[j].t >= 0.5 * t_last * (1.0 - 1e-12)) idx.push_back(j);
  }
  return idx;
}

/// Snapshots from the middle of the run on (t >= T/2 or t >= t_stop/2).
std::vector<std::size_t> late_half(const Trajectory& tr) {
  const double mid = 0.5 * (finite_T(tr) ? tr.geometry->singular_time() : tr.final_time());
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < tr.rows.size(); ++j)
    if (tr.rows[j].t >= mid * (1.0 - 1e-12)) idx.push_back(j);
  return idx;
}

InequalityReport sup_report(const Trajectory& tr, std::string name, double DiagnosticsRow::*field) {
  InequalityReport r;
  r.name = std::move(name);
  r.C = -kInf;
  for (const auto& row : tr.rows) {
    r.t.push_back(row.t);
    r.margin.push_back(row.*field);
    r.C = std::max(r.C, row.*field);
  }
  if (!std::isfinite(r.C)) r.verdict = Verdict::Diverges;
  return r;
}

/// Certified divergence: below -A for every ladder threshold at the end and
/// monotonically decreasing across the window.
bool ladder_diverges(const std::vector<double>& series, const std::vector<std::size_t>& window) {
  if (window.size() < 2) return false;
  const double last = series[window.back()];
  for (double A : kLadder)
    if (!(last < -A)) return false;
  for (std::size_t i = 1; i < window.size(); ++i)
    if (series[window[i]] > series[window[i - 1]]) return false;
  return true;
}

struct PointData {
  Field u, ut;
};

PointData point_data(const Trajectory& tr, std::size_t j) {
  const auto& g = *tr.geometry;
  const auto& s = tr.snapshots[j];
  return {g.to_points(s.u), g.to_points(s.ut)};
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::BoundedStable: return "BoundedStable";
    case Verdict::BoundedUnstable: return "BoundedUnstable";
    case Verdict::Diverges: return "Diverges";
  }
  return {};
}

std::string to_string(LowerBoundMode m) {
  switch (m) {
    case LowerBoundMode::SemiAmple: return "semi-ample";
    case LowerBoundMode::Divisor: return "divisor";
    case LowerBoundMode::NonCollapsing: return "noncollapsing";
  }
  return {};
}

LowerBoundMode parse_lower_bound_mode(const std::string& s) {
  if (s == "semi-ample") return LowerBoundMode::SemiAmple;
  if (s == "divisor") return LowerBoundMode::Divisor;
  if (s == "noncollapsing") return LowerBoundMode::NonCollapsing;
  throw ConfigError("unknown lower bound mode '" + s + "'");
}

double InequalityReport::constant(const std::string& key) const {
  for (const auto& c : constants)
    if (c.name == key) return c.value;
  throw std::out_of_range("no constant named " + key + " in report " + name);
}

double AsymptoticFit::relative_error() const {
  return k_reference == 0 ? std::abs(k_hat) : std::abs(k_hat - k_reference) / k_reference;
}

double relative_drift(double base, double refined) {
  if (!std::isfinite(base) || !std::isfinite(refined)) return kInf;
  return std::abs(refined - base) / std::max(std::abs(base), kDriftFloor);
}

std::array<double, 3> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DiagnosticError("fit_line: need at least two samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  if (!(sxx > 0)) throw DiagnosticError("fit_line: degenerate abscissae");
  const double slope = sxy / sxx, c0 = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) ss += std::pow(y[i] - c0 - slope * x[i], 2);
  return {c0, slope, std::sqrt(ss / n)};
}

InequalityReport essential_decreasing_report(const Trajectory& tr) {
  require_snapshots(tr, "essential_decreasing_report");
  return sup_report(tr, "essential_decreasing", &DiagnosticsRow::max_essential);
}

InequalityReport volume_form_decreasing_report(const Trajectory& tr) {
  require_snapshots(tr, "volume_form_decreasing_report");
  InequalityReport r = sup_report(tr, "volume_form_decreasing", &DiagnosticsRow::max_et_utt_plus_ut);
  double c = -kInf;
  for (const auto& row : tr.rows) c = std::max(c, std::exp(row.t) * row.max_ut);
  r.constants.push_back({"C_ut", c});
  r.checked.push_back("C_ut");
  return r;
}

InequalityReport lower_bound_report(const Trajectory& tr, LowerBoundMode mode) {
  require_snapshots(tr, "lower_bound_report");
  const auto& g = *tr.geometry;
  const Regime& regime = g.path().regime();
  InequalityReport r;
  r.name = "lower_bound_" + to_string(mode);
  r.C = -kInf;

  switch (mode) {
    case LowerBoundMode::SemiAmple: {
      if (!regime.semi_ample_limit && regime.kind != RegimeKind::InfiniteNonCollapsing)
        throw DiagnosticError("semi-ample lower bound needs a semi-ample limit class");
      double cu = -kInf, cut = -kInf;
      const double T = g.singular_time();
      for (const auto& row : tr.rows) {
        const double q = std::isfinite(T) ? row.min_semiample : row.min_utu;
        r.t.push_back(row.t);
        r.margin.push_back(-q);
        r.C = std::max(r.C, -q);
        cu = std::max(cu, -row.min_u);
        const double w = std::isfinite(T) ? 1.0 - std::exp(row.t - T) : 1.0;
        cut = std::max(cut, -row.min_ut * w);
      }
      r.constants = {{"C_u", cu}, {"C_ut", cut}};
      r.checked = {"C_u"};
      break;
    }
    case LowerBoundMode::Divisor: {
      if (regime.kind != RegimeKind::FiniteNonCollapsing)
        throw DiagnosticError("divisor lower bound needs a finite-time non-collapsing regime");
      Field sigma;
      try {
        sigma = g.divisor_log_sigma();
      } catch (const Unsupported& e) {
        throw DiagnosticError(e.what());
      }
      const Field sigma_pts = g.to_points(sigma);
      for (std::size_t j = 0; j < tr.snapshots.size(); ++j) {
        const Field u = g.to_points(tr.snapshots[j].u);
        double m = kInf;
        for (std::size_t p = 0; p < u.size(); ++p) m = std::min(m, u[p] - sigma_pts[p]);
        r.t.push_back(tr.snapshots[j].t);
        r.margin.push_back(-m);
        r.C = std::max(r.C, -m);
      }
      double cu = -kInf;
      for (const auto& row : tr.rows) cu = std::max(cu, -row.min_u);
      r.constants = {{"C_u", cu}};
      break;
    }
    case LowerBoundMode::NonCollapsing: {
      if (regime.kind != RegimeKind::FiniteNonCollapsing && regime.kind != RegimeKind::InfiniteNonCollapsing)
        throw DiagnosticError("noncollapsing lower bound needs a non-collapsing regime");
      double c = kInf;
      for (const auto& row : tr.rows) {
        r.t.push_back(row.t);
        r.margin.push_back(-row.max_u);
        r.C = std::max(r.C, -row.max_u);
        c = std::min(c, row.integral_exp_u / row.V_cohom);
      }
      r.constants = {{"c_volume", c}};
      r.checked = {"c_volume"};
      break;
    }
  }
  if (!std::isfinite(r.C)) r.verdict = Verdict::Diverges;
  return r;
}

InequalityReport schwarz_report(const Trajectory& tr) {
  require_snapshots(tr, "schwarz_report");
  const auto& g = *tr.geometry;
  const double n = g.dimension();
  const auto window = fit_window(tr);

  // Per snapshot and C2: max over X of log phi + C2 * composite.
  std::vector<std::array<double, kSchwarzGrid.size()>> series(tr.snapshots.size());
  // Sandwich data: per snapshot, per B, inf of log(lmin) - B h and sup of log(lmax) + B h.
  std::vector<std::array<double, kSandwichGrid.size()>> low(tr.snapshots.size()), up(tr.snapshots.size());
  for (std::size_t j = 0; j < tr.snapshots.size(); ++j) {
    const auto& s = tr.snapshots[j];
    const auto [u, ut] = point_data(tr, j);
    const Field phi = g.to_points(g.trace_w0(s.u, s.t));
    const EigenRange er = g.eigen_range_w0(s.u, s.t);
    const double et = std::exp(s.t);
    series[j].fill(-kInf);
    low[j].fill(kInf);
    up[j].fill(-kInf);
    for (std::size_t p = 0; p < u.size(); ++p) {
      const double comp = (et - 1.0) * ut[p] - u[p] - n * s.t;
      const double lphi = std::log(phi[p]);
      for (std::size_t k = 0; k < kSchwarzGrid.size(); ++k)
        series[j][k] = std::max(series[j][k], lphi + kSchwarzGrid[k] * comp);
      const double h = et * ut[p] - s.t;
      const double lmin = std::log(er.min[p]), lmax = std::log(er.max[p]);
      for (std::size_t k = 0; k < kSandwichGrid.size(); ++k) {
        low[j][k] = std::min(low[j][k], lmin - kSandwichGrid[k] * h);
        up[j][k] = std::max(up[j][k], lmax + kSandwichGrid[k] * h);
      }
    }
  }

  // Smallest C2 whose composite is non-increasing over the asymptotic window.
  std::size_t pick = kSchwarzGrid.size() - 1;
  for (std::size_t k = 0; k < kSchwarzGrid.size(); ++k) {
    bool ok = true;
    for (std::size_t i = 1; i < window.size() && ok; ++i)
      ok = series[window[i]][k] <= series[window[i - 1]][k] + 1e-9;
    if (ok) {
      pick = k;
      break;
    }
  }

  InequalityReport r;
  r.name = "schwarz";
  r.C = -kInf;
  for (std::size_t j = 0; j < tr.snapshots.size(); ++j) {
    r.t.push_back(tr.snapshots[j].t);
    r.margin.push_back(series[j][pick]);
    r.C = std::max(r.C, series[j][pick]);
  }
  const double C2 = kSchwarzGrid[pick];

  // Sandwich C^{-1} e^{B h} omega_0 <= omega~ <= C e^{-B h} omega_0 with h = e^t u_t - t.
  std::size_t best = 0;
  double best_logC = kInf;
  for (std::size_t k = 0; k < kSandwichGrid.size(); ++k) {
    double lo = kInf, hi = -kInf;
    for (std::size_t j = 0; j < tr.snapshots.size(); ++j) lo = std::min(lo, low[j][k]), hi = std::max(hi, up[j][k]);
    const double logC = std::max({-lo, hi, 0.0});
    if (logC < best_logC) best_logC = logC, best = k;
  }
  double worst = kInf;
  for (std::size_t j = 0; j < tr.snapshots.size(); ++j)
    worst = std::min({worst, low[j][best] + best_logC, best_logC - up[j][best]});
  r.holds = std::isfinite(best_logC) && worst >= -1e-12;
  r.constants = {{"C2", C2}, {"C1_proxy", C2 - 1.0}, {"sandwich_B", kSandwichGrid[best]},
                 {"sandwich_logC", best_logC}, {"sandwich_min_margin", worst}};
  r.checked = {"sandwich_logC"};
  if (!std::isfinite(r.C)) r.verdict = Verdict::Diverges;
  return r;
}

std::vector<InequalityReport> collapsing_report(const Trajectory& tr) {
  require_snapshots(tr, "collapsing_report");
  if (!collapsing(tr)) throw DiagnosticError("collapsing_report needs a collapsing regime");
  const auto& g = *tr.geometry;
  const auto window = fit_window(tr);
  const auto late = late_half(tr);
  std::vector<InequalityReport> out;

  auto divergence = [&](std::string name, double DiagnosticsRow::*field) {
    InequalityReport r;
    r.name = std::move(name);
    for (const auto& row : tr.rows) r.t.push_back(row.t), r.margin.push_back(row.*field);
    r.C = r.margin.back();
    r.verdict = ladder_diverges(r.margin, window) ? Verdict::Diverges : Verdict::BoundedUnstable;
    return r;
  };
  out.push_back(divergence("utu_diverges", &DiagnosticsRow::max_utu));
  out.push_back(divergence("collapse_composite_diverges", &DiagnosticsRow::max_collapse));

  // u_t <= (u + C(S)) / (e^{t-S} - 1) for t > S, with C(S) = sup (e^{t-S} - 1) u_t - u.
  {
    InequalityReport r;
    r.name = "ut_interpolation";
    r.C = -kInf;
    const double horizon = finite_T(tr) ? g.singular_time() : tr.final_time();
    std::vector<double> cs(kInterpolationFractions.size(), -kInf);
    for (std::size_t j = 0; j < tr.snapshots.size(); ++j) {
      const double t = tr.snapshots[j].t;
      const auto [u, ut] = point_data(tr, j);
      double m = -kInf;
      for (std::size_t k = 0; k < kInterpolationFractions.size(); ++k) {
        const double S = kInterpolationFractions[k] * horizon;
        if (t < S) continue;
        const double w = std::expm1(t - S);
        for (std::size_t p = 0; p < u.size(); ++p) {
          const double v = w * ut[p] - u[p];
          cs[k] = std::max(cs[k], v);
          m = std::max(m, v);
        }
      }
      r.t.push_back(t);
      r.margin.push_back(m);
    }
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const std::string key = "C_S" + std::to_string(static_cast<int>(100 * kInterpolationFractions[k]));
      r.constants.push_back({key, cs[k]});
      r.checked.push_back(key);
      r.C = std::max(r.C, cs[k]);
    }
    out.push_back(std::move(r));
  }

  // max(u_t + u) >= k L - C_max and min(u_t + u) <= k L + C_min on the late half.
  {
    InequalityReport r;
    r.name = "log_bounds";
    const double k = g.path().collapse_exponent();
    double cmax = -kInf, cmin = -kInf;
    for (std::size_t j : late) {
      const auto& row = tr.rows[j];
      const double L = rate_variable(tr, row.t);
      cmax = std::max(cmax, k * L - row.max_utu);
      cmin = std::max(cmin, row.min_utu - k * L);
      r.t.push_back(row.t);
      r.margin.push_back(k * L - row.max_utu);
    }
    r.C = cmax;
    r.constants = {{"k", k}, {"C_max_side", cmax}, {"C_min_side", cmin}};
    r.checked = {"C_min_side"};
    r.holds = std::isfinite(cmax) && std::isfinite(cmin);
    out.push_back(std::move(r));
  }

  // Measured only: osc(u_t + u) against 1 - L and the mean deviation max u - mean u.
  {
    InequalityReport r;
    r.name = "osc_utu_measured";
    r.C = -kInf;
    for (const auto& row : tr.rows) {
      const double v = row.osc_utu / (1.0 - rate_variable(tr, row.t));
      r.t.push_back(row.t), r.margin.push_back(row.osc_utu);
      if (row.t > 0) r.C = std::max(r.C, v);
    }
    out.push_back(std::move(r));
  }
  {
    InequalityReport r;
    r.name = "mean_deviation_measured";
    r.C = -kInf;
    for (const auto& row : tr.rows) {
      const double v = row.max_u - row.mean_u;
      r.t.push_back(row.t), r.margin.push_back(v);
      r.C = std::max(r.C, v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

AsymptoticFit fit_exponent(const Trajectory& tr) {
  if (!collapsing(tr)) throw DiagnosticError("fit_exponent needs a collapsing regime");
  const auto window = fit_window(tr);
  if (static_cast<int>(window.size()) < kMinSnapshots)
    throw DiagnosticError("fit_exponent: fit window holds " + std::to_string(window.size()) + " snapshots, need " +
                          std::to_string(kMinSnapshots));
  AsymptoticFit f;
  f.k_reference = tr.geometry->path().collapse_exponent();
  f.samples = static_cast<int>(window.size());
  f.window_begin = tr.rows[window.front()].t;
  f.window_end = tr.rows[window.back()].t;
  std::vector<double> x, y, ym, yv;
  for (std::size_t j : window) {
    const auto& row = tr.rows[j];
    if (finite_T(tr)) {
      x.push_back(rate_variable(tr, row.t));
      y.push_back(row.max_utu);
      ym.push_back(row.mean_utu);
      yv.push_back(std::log(row.V_cohom));
    } else {
      x.push_back(row.t);
      y.push_back(row.mean_u);
    }
  }
  const auto [c0, slope, res] = fit_line(x, y);
  f.c0 = c0;
  f.residual = res;
  if (finite_T(tr)) {
    f.target = "max_X(u_t + u)";
    f.model = "c0 + k log(T - t)";
    f.k_hat = slope;
    f.k_hat_mean = fit_line(x, ym)[1];
    f.k_hat_volume = fit_line(x, yv)[1];
  } else {
    f.target = "mean_X(u)";
    f.model = "c0 - k t";
    f.k_hat = -slope;
    f.k_hat_mean = f.k_hat;
  }
  return f;
}

LimitProfile limit_profile(const Trajectory& tr) {
  if (!finite_T(tr)) throw DiagnosticError("limit_profile needs a finite singular time");
  require_snapshots(tr, "limit_profile");
  const auto& g = *tr.geometry;
  LimitProfile lp;
  lp.C = volume_form_decreasing_report(tr).C;
  lp.tolerance = 10.0 * tr.controller.newton_tol;

  std::vector<Field> W(tr.snapshots.size());
  for (std::size_t j = 0; j < tr.snapshots.size(); ++j) {
    const auto [u, ut] = point_data(tr, j);
    const double shift = lp.C * std::exp(-tr.snapshots[j].t);
    W[j].resize(u.size());
    for (std::size_t p = 0; p < u.size(); ++p) W[j][p] = ut[p] + u[p] + shift;
  }
  lp.field = {W.back(), tr.final_time()};

  const Field& last = W.back();
  const double lowest = *std::min_element(last.begin(), last.end());
  for (double A = 1.0; A <= 1024.0; A *= 2.0) {
    SublevelSet s;
    s.A = A;
    double sum = 0.0;
    s.coord_min = kInf, s.coord_max = -kInf;
    for (std::size_t p = 0; p < last.size(); ++p) {
      if (last[p] > -A) continue;
      ++s.count;
      const double x = g.point_coordinate(static_cast<int>(p));
      s.coord_min = std::min(s.coord_min, x), s.coord_max = std::max(s.coord_max, x), sum += x;
    }
    s.fraction = static_cast<double>(s.count) / static_cast<double>(last.size());
    s.coord_mean = s.count > 0 ? sum / s.count : std::numeric_limits<double>::quiet_NaN();
    if (s.count == 0) s.coord_min = s.coord_max = s.coord_mean;
    for (std::size_t j = 1; j < W.size() && s.nested_in_t; ++j)
      for (std::size_t p = 0; p < last.size(); ++p)
        if (W[j - 1][p] <= -A && W[j][p] > -A + lp.tolerance) {
          s.nested_in_t = false;
          break;
        }
    lp.nested_in_t = lp.nested_in_t && s.nested_in_t;
    if (!lp.sets.empty() && s.count > lp.sets.back().count) lp.nested_in_A = false;
    lp.sets.push_back(s);
    if (-A < lowest) break;
  }
  return lp;
}

std::vector<InequalityReport> curvature_probe_report(const Trajectory& tr) {
  require_snapshots(tr, "curvature_probe_report");
  const auto& g = *tr.geometry;
  try {
    (void)g.ricci_probe(tr.snapshots.front().u, tr.snapshots.front().t);
  } catch (const Unsupported& e) {
    throw DiagnosticError(e.what());
  }
  std::vector<InequalityReport> out;
  double inf_u = -kInf;
  for (const auto& row : tr.rows) inf_u = std::max(inf_u, -row.min_u);

  InequalityReport ric;
  ric.name = "ricci_lower";
  ric.C = -kInf;
  for (const auto& row : tr.rows) {
    ric.t.push_back(row.t), ric.margin.push_back(-row.min_ricci);
    ric.C = std::max(ric.C, -row.min_ricci);
  }
  ric.constants = {{"inf_u", inf_u}};
  out.push_back(std::move(ric));

  if (finite_T(tr)) {
    const double T = g.singular_time();
    InequalityReport t1;
    t1.name = "type_one";
    t1.C = -kInf;
    for (const auto& row : tr.rows) {
      const double v = row.max_scalar * (T - row.t);
      t1.t.push_back(row.t), t1.margin.push_back(v);
      t1.C = std::max(t1.C, v);
    }
    t1.constants = {{"inf_u", inf_u}};
    out.push_back(std::move(t1));
  }

  // dU/dt >= -C (1 - L): dU/dt equals u_t at the minimum point.
  InequalityReport ur;
  ur.name = "U_rate";
  ur.C = 0.0;
  for (const auto& row : tr.rows) {
    const double v = -row.ut_at_xmin / (1.0 - rate_variable(tr, row.t));
    ur.t.push_back(row.t), ur.margin.push_back(v);
    ur.C = std::max(ur.C, v);
  }
  out.push_back(std::move(ur));
  return out;
}

void apply_refinements(std::vector<InequalityReport>& base,
                       const std::vector<std::pair<std::string, std::vector<InequalityReport>>>& refined) {
  for (auto& r : base) {
    bool stable = std::isfinite(r.C);
    for (const auto& [label, reports] : refined) {
      auto it = std::find_if(reports.begin(), reports.end(), [&](const auto& x) { return x.name == r.name; });
      if (it == reports.end()) continue;
      Refinement ref{label, it->C, relative_drift(r.C, it->C)};
      for (const auto& key : r.checked) ref.drift = std::max(ref.drift, relative_drift(r.constant(key), it->constant(key)));
      stable = stable && ref.drift < r.drift_tolerance;
      r.refinements.push_back(ref);
    }
    if (r.verdict == Verdict::Diverges) continue;
    r.verdict = stable && !r.refinements.empty() ? Verdict::BoundedStable : Verdict::BoundedUnstable;
  }
}

}  // namespace krf
