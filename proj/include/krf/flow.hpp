#pragma once

#include "krf/diagnostics.hpp"
#include "krf/geometry.hpp"

#include <Eigen/SparseLU>

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace krf {

struct StepController {
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  double newton_tol = 1e-10;
  int max_newton_iters = 30;
  /// Extra Newton iterations after newton_tol is met, while the residual still drops 4x.
  int polish_iters = 3;
  /// Local error tolerance of the step-doubling estimate (sup norm).
  double step_tol = 1e-7;
  /// Richardson-extrapolate accepted steps (second order locally).
  bool extrapolate = true;
  /// Finite T: stop at T - stop_offset.
  double stop_offset = 1e-3;
  /// Infinite T: stop at t_max.
  double t_max = 20.0;
  /// Infinite T snapshot spacing.
  double snapshot_spacing = 0.5;
  /// Finite T: uniform snapshots on [0, T/2) and substeps per halving of T - t after that.
  int early_snapshots = 8;
  int substeps_per_halving = 4;
  /// Additional snapshot times merged into the schedule (ignored past the stop time).
  std::vector<double> extra_times;
  long max_steps = 2000000;
};

enum class TerminationReason { ReachedStop, PositivityBreakdown, DtUnderflow, NewtonDiverged };
std::string to_string(TerminationReason r);

struct Trajectory {
  std::shared_ptr<const ReducedGeometry> geometry;
  StepController controller;
  double stop_time = 0.0;
  std::vector<FlowState> snapshots;     // includes t = 0
  std::vector<DiagnosticsRow> rows;     // one per snapshot
  TerminationReason termination = TerminationReason::ReachedStop;
  /// Finite-T run stopped early with the positivity margin collapsing.
  bool singularity_detected = false;
  long accepted_steps = 0;
  long rejected_steps = 0;
  long newton_iterations = 0;
  long factorizations = 0;
  int positivity_violations = 0;  // accepted steps failing the independent check
  int amgm_violations = 0;

  const FlowState& last() const { return snapshots.back(); }
  double final_time() const { return snapshots.back().t; }
};

/// Damped Newton solver for backward Euler, reusing the sparsity analysis.
class ImplicitEulerSolver {
 public:
  ImplicitEulerSolver(const ReducedGeometry& g, const StepController& c);
  /// One backward Euler step of size dt. Returns false on Newton or positivity failure.
  bool solve(const FlowState& s, double dt, FlowState& out, TerminationReason* why = nullptr);
  long iterations() const { return iterations_; }
  long factorizations() const { return factorizations_; }

 private:
  Field residual(const Field& v, const Field& u_old, double t_new, double dt) const;

  struct Factorization {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    double dt = 0.0;
    bool analyzed = false, valid = false;
    long last_used = 0;
  };
  bool refactor(Factorization& f, const Field& v, double t_new, double dt);

  const ReducedGeometry& g_;
  StepController c_;
  std::array<Factorization, 2> cache_;  // one per step size of a doubling pair
  long calls_ = 0;
  long iterations_ = 0;
  long factorizations_ = 0;
};

FlowState initial_state(const ReducedGeometry& g);
/// Raw fixed-step backward Euler (used for the order check).
FlowState implicit_euler_step(const FlowState& s, double dt, const ReducedGeometry& g, const StepController& c);

/// Adaptive stepper: step doubling with optional local extrapolation.
class AdaptiveStepper {
 public:
  AdaptiveStepper(const ReducedGeometry& g, const StepController& c);
  /// Advance s by one accepted step, never beyond t_stop.
  /// Returns false (with reason) when dt falls below dt_min.
  bool step(FlowState& s, double t_stop, TerminationReason& why);
  double last_dt() const { return last_dt_; }
  double next_dt() const { return dt_; }
  long rejected() const { return rejected_; }
  long newton_iterations() const { return solver_.iterations(); }
  long factorizations() const { return solver_.factorizations(); }

 private:
  const ReducedGeometry& g_;
  StepController c_;
  ImplicitEulerSolver solver_;
  double dt_;
  double last_dt_ = 0.0;
  long rejected_ = 0;
};

std::vector<double> snapshot_schedule(const ClassPath& path, const StepController& c);
Trajectory evolve(std::shared_ptr<const ReducedGeometry> g, const StepController& c);

}  // namespace krf
