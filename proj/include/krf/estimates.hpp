#pragma once

#include "krf/flow.hpp"

#include <array>
#include <string>
#include <vector>

namespace krf {

enum class Verdict { BoundedStable, BoundedUnstable, Diverges };
std::string to_string(Verdict v);

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct Refinement {
  std::string label;  // "dt/2", "N*2", "eps/2", "R*2"
  double C = 0.0;
  double drift = 0.0;  // worst relative change over C and the checked constants
};

/// One inequality tested along a trajectory.
struct InequalityReport {
  std::string name;
  /// Smallest constant making the inequality hold on every snapshot.
  double C = 0.0;
  /// Per-snapshot value whose supremum is C.
  std::vector<double> t, margin;
  Verdict verdict = Verdict::BoundedUnstable;
  /// Further fitted constants; checked ones take part in the drift test.
  std::vector<NamedValue> constants;
  std::vector<std::string> checked;
  /// Pointwise property (sandwich, nesting) held everywhere.
  bool holds = true;
  std::vector<Refinement> refinements;
  double drift_tolerance = 0.1;

  double constant(const std::string& name) const;
};

struct AsymptoticFit {
  std::string target;
  std::string model;  // "c0 + k log(T-t)" or "c0 - k t"
  double k_hat = 0.0;
  double c0 = 0.0;
  double window_begin = 0.0, window_end = 0.0;
  int samples = 0;
  double residual = 0.0;  // rms
  int k_reference = 0;
  /// Same fit applied to the Omega-mean of u_t + u and to log V (finite T only).
  double k_hat_mean = 0.0;
  double k_hat_volume = 0.0;

  double relative_error() const;
};

enum class LowerBoundMode { SemiAmple, Divisor, NonCollapsing };
std::string to_string(LowerBoundMode m);
LowerBoundMode parse_lower_bound_mode(const std::string& s);

/// Minimum number of snapshots any report needs.
inline constexpr int kMinSnapshots = 10;
/// |Delta C| / max(|C|, floor) is the drift measure.
inline constexpr double kDriftFloor = 0.1;

InequalityReport essential_decreasing_report(const Trajectory& tr);
InequalityReport volume_form_decreasing_report(const Trajectory& tr);
InequalityReport lower_bound_report(const Trajectory& tr, LowerBoundMode mode);
/// Parabolic Schwarz composite (scanned C2) and the pointwise metric sandwich.
InequalityReport schwarz_report(const Trajectory& tr);
std::vector<InequalityReport> collapsing_report(const Trajectory& tr);
AsymptoticFit fit_exponent(const Trajectory& tr);

struct SublevelSet {
  double A = 0.0;
  int count = 0;       // points of the last snapshot with V <= -A
  double fraction = 0.0;
  double coord_min = 0.0, coord_max = 0.0, coord_mean = 0.0;
  bool nested_in_t = true;  // grows monotonically along the snapshots
};

struct LimitProfile {
  PotentialField field;  // u_t + u + C e^{-t} at the last snapshot, on the points of X
  double C = 0.0;
  double tolerance = 0.0;
  std::vector<SublevelSet> sets;
  bool nested_in_A = true;
  bool nested_in_t = true;
};

LimitProfile limit_profile(const Trajectory& tr);

std::vector<InequalityReport> curvature_probe_report(const Trajectory& tr);

/// Fill refinement deltas by name and settle the verdicts. Reports that are
/// already Diverges stay so; others become BoundedStable when every drift is
/// under tolerance.
void apply_refinements(std::vector<InequalityReport>& base,
                       const std::vector<std::pair<std::string, std::vector<InequalityReport>>>& refined);

double relative_drift(double base, double refined);

/// Least-squares line through (x, y): returns {intercept, slope, rms residual}.
std::array<double, 3> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace krf
