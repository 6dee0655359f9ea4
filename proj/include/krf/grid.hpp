#pragma once

#include <array>
#include <string>
#include <vector>

namespace krf {

enum class Spacing { Uniform, Stretched };

Spacing parse_spacing(const std::string& s);
std::string to_string(Spacing s);

/// Node layout on the truncated line [-R, R].
///
/// Stretched grids are uniform in a computational coordinate xi in [-1, 1]
/// and map to rho through the logistic coordinate s = e^rho / (1 + e^rho):
/// near the centre rho ~ core_scale * xi, near either end s (or 1 - s) is
/// linear in xi with slope tail_weight / 2. Functions that are smooth in
/// e^{rho} at the ends therefore stay resolvable in double precision even
/// when R is large.
struct LineGridSpec {
  int nodes = 512;
  double half_width = 20.0;
  Spacing spacing = Spacing::Stretched;
  double core_scale = 14.0;
  double tail_weight = 1e-4;
};

/// One row of a derivative stencil in physical coordinates.
struct StencilRow {
  int count = 0;
  std::array<int, 4> col{};
  std::array<double, 4> d1{};
  std::array<double, 4> d2{};
};

class Grid1D {
 public:
  static Grid1D truncated_line(const LineGridSpec& spec);
  static Grid1D periodic(int nodes, double length);

  int size() const { return static_cast<int>(x_.size()); }
  bool periodic() const { return periodic_; }
  /// Half-width R (line) or period L (periodic).
  double extent() const { return extent_; }
  Spacing spacing() const { return spacing_; }
  const std::vector<double>& nodes() const { return x_; }
  double node(int i) const { return x_[i]; }
  /// Quadrature weights for integrals in the physical coordinate.
  const std::vector<double>& weights() const { return w_; }
  const std::vector<StencilRow>& stencil() const { return rows_; }
  /// Logistic sigma(x_i) and sigma(-x_i), accurate at both ends of the line.
  const std::vector<double>& sigma_plus() const { return sp_; }
  const std::vector<double>& sigma_minus() const { return sm_; }

  /// First and second derivatives of a nodal field.
  void differentiate(const std::vector<double>& f, std::vector<double>& d1, std::vector<double>& d2) const;
  double integrate(const std::vector<double>& f) const;

 private:
  void build_line_stencils(const std::vector<double>& gp, const std::vector<double>& gpp, double dxi);

  std::vector<double> x_, w_, sp_, sm_;
  std::vector<StencilRow> rows_;
  bool periodic_ = false;
  double extent_ = 0.0;
  Spacing spacing_ = Spacing::Uniform;
};

}  // namespace krf
