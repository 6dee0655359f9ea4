#include "krf/grid.hpp"

#include "krf/errors.hpp"

#include <cmath>

namespace krf {

namespace {

double logistic(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

struct StretchedMap {
  double c, mu, smin, scale, denom;

  StretchedMap(double core, double tail, double R)
      : c(core), mu(tail), smin(logistic(-R)), scale(1.0 - 2.0 * logistic(-R)),
        denom(logistic(core) - logistic(-core)) {}

  double s(double xi) const {
    const double p = (1.0 - mu) * (logistic(c * xi) - logistic(-c)) / denom + 0.5 * mu * (xi + 1.0);
    return smin + scale * p;
  }
  double ds(double xi) const {
    const double sg = logistic(c * xi) * logistic(-c * xi);
    return scale * ((1.0 - mu) * c * sg / denom + 0.5 * mu);
  }
  double d2s(double xi) const {
    const double sg = logistic(c * xi) * logistic(-c * xi);
    return scale * (1.0 - mu) * c * c * sg * (logistic(-c * xi) - logistic(c * xi)) / denom;
  }
};

}  // namespace

Spacing parse_spacing(const std::string& s) {
  if (s == "uniform") return Spacing::Uniform;
  if (s == "stretched" || s == "tanh") return Spacing::Stretched;
  throw ConfigError("unknown grid spacing '" + s + "'");
}

std::string to_string(Spacing s) { return s == Spacing::Uniform ? "uniform" : "stretched"; }

Grid1D Grid1D::truncated_line(const LineGridSpec& spec) {
  if (spec.nodes < 16) throw ConfigError("grid needs at least 16 nodes");
  if (!(spec.half_width > 0)) throw ConfigError("grid half-width must be positive");
  Grid1D g;
  g.periodic_ = false;
  g.extent_ = spec.half_width;
  g.spacing_ = spec.spacing;
  const int n = spec.nodes;
  const double dxi = 2.0 / (n - 1);
  std::vector<double> gp(n), gpp(n);
  g.x_.resize(n);
  g.sp_.resize(n);
  g.sm_.resize(n);
  if (spec.spacing == Spacing::Uniform) {
    for (int i = 0; i < n; ++i) {
      const double xi = -1.0 + i * dxi;
      g.x_[i] = spec.half_width * xi;
      gp[i] = spec.half_width;
      gpp[i] = 0.0;
      g.sp_[i] = logistic(g.x_[i]);
      g.sm_[i] = logistic(-g.x_[i]);
    }
    g.x_.front() = -spec.half_width;
    g.x_.back() = spec.half_width;
  } else {
    if (!(spec.core_scale > 0) || !(spec.tail_weight > 0 && spec.tail_weight < 1))
      throw ConfigError("stretched grid needs core_scale > 0 and 0 < tail_weight < 1");
    StretchedMap map(spec.core_scale, spec.tail_weight, spec.half_width);
    for (int i = 0; i < n; ++i) {
      // Index from both ends so that xi is exactly antisymmetric.
      const double xi = i <= (n - 1) / 2 ? -1.0 + i * dxi : 1.0 - (n - 1 - i) * dxi;
      const double sl = map.s(xi), sr = map.s(-xi);
      g.x_[i] = std::log(sl) - std::log(sr);
      g.sp_[i] = sl / (sl + sr);
      g.sm_[i] = sr / (sl + sr);
      const double al = map.ds(xi) / sl, ar = map.ds(-xi) / sr;
      gp[i] = al + ar;
      gpp[i] = (map.d2s(xi) / sl - al * al) - (map.d2s(-xi) / sr - ar * ar);
    }
  }
  for (int i = 1; i < n; ++i)
    if (!(g.x_[i] > g.x_[i - 1])) throw ConfigError("grid nodes are not strictly increasing; reduce nodes or R");
  g.w_.resize(n);
  for (int i = 0; i < n; ++i) g.w_[i] = dxi * gp[i] * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
  g.build_line_stencils(gp, gpp, dxi);
  return g;
}

void Grid1D::build_line_stencils(const std::vector<double>& gp, const std::vector<double>& gpp, double dxi) {
  const int n = size();
  rows_.assign(n, StencilRow{});
  const double h1 = 1.0 / (2.0 * dxi), h2 = 1.0 / (dxi * dxi);
  for (int i = 0; i < n; ++i) {
    StencilRow r;
    std::array<double, 4> a1{}, a2{};  // derivatives in xi
    if (i == 0) {
      r.count = 4;
      r.col = {0, 1, 2, 3};
      a1 = {-3 * h1, 4 * h1, -1 * h1, 0};
      a2 = {2 * h2, -5 * h2, 4 * h2, -1 * h2};
    } else if (i == n - 1) {
      r.count = 4;
      r.col = {n - 4, n - 3, n - 2, n - 1};
      a1 = {0, 1 * h1, -4 * h1, 3 * h1};
      a2 = {-1 * h2, 4 * h2, -5 * h2, 2 * h2};
    } else {
      r.count = 3;
      r.col = {i - 1, i, i + 1, 0};
      a1 = {-h1, 0, h1, 0};
      a2 = {h2, -2 * h2, h2, 0};
    }
    for (int k = 0; k < r.count; ++k) {
      r.d1[k] = a1[k] / gp[i];
      r.d2[k] = (a2[k] - gpp[i] * r.d1[k]) / (gp[i] * gp[i]);
    }
    rows_[i] = r;
  }
}

Grid1D Grid1D::periodic(int nodes, double length) {
  if (nodes < 16) throw ConfigError("grid needs at least 16 nodes");
  if (!(length > 0)) throw ConfigError("period must be positive");
  Grid1D g;
  g.periodic_ = true;
  g.extent_ = length;
  g.spacing_ = Spacing::Uniform;
  const double h = length / nodes;
  g.x_.resize(nodes);
  g.w_.assign(nodes, h);
  g.sp_.assign(nodes, 0.5);
  g.sm_.assign(nodes, 0.5);
  g.rows_.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    g.x_[i] = i * h;
    StencilRow r;
    r.count = 3;
    r.col = {(i + nodes - 1) % nodes, i, (i + 1) % nodes, 0};
    r.d1 = {-0.5 / h, 0, 0.5 / h, 0};
    r.d2 = {1 / (h * h), -2 / (h * h), 1 / (h * h), 0};
    g.rows_[i] = r;
  }
  return g;
}

void Grid1D::differentiate(const std::vector<double>& f, std::vector<double>& d1, std::vector<double>& d2) const {
  const int n = size();
  d1.assign(n, 0.0);
  d2.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& r = rows_[i];
    double a = 0, b = 0;
    for (int k = 0; k < r.count; ++k) {
      a += r.d1[k] * f[r.col[k]];
      b += r.d2[k] * f[r.col[k]];
    }
    d1[i] = a;
    d2[i] = b;
  }
}

double Grid1D::integrate(const std::vector<double>& f) const {
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += w_[i] * f[i];
  return acc;
}

}  // namespace krf
