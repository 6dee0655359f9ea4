#include "krf/flow.hpp"

#include "krf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace krf {

namespace {

double sup_norm(const Field& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return std::isfinite(m) ? m : std::numeric_limits<double>::infinity();
}

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::ReachedStop: return "ReachedStop";
    case TerminationReason::PositivityBreakdown: return "PositivityBreakdown";
    case TerminationReason::DtUnderflow: return "DtUnderflow";
    case TerminationReason::NewtonDiverged: return "NewtonDiverged";
  }
  return "?";
}

ImplicitEulerSolver::ImplicitEulerSolver(const ReducedGeometry& g, const StepController& c) : g_(g), c_(c) {}

Field ImplicitEulerSolver::residual(const Field& v, const Field& u_old, double t_new, double dt) const {
  Field r = g_.ma_log(v, t_new);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = v[i] - u_old[i] - dt * (r[i] - v[i]);
  return r;
}

bool ImplicitEulerSolver::refactor(Factorization& f, const Field& v, double t_new, double dt) {
  const int n = static_cast<int>(v.size());
  Eigen::SparseMatrix<double> J = -dt * g_.linearization(v, t_new);
  for (int i = 0; i < n; ++i) J.coeffRef(i, i) += 1.0 + dt;
  J.makeCompressed();
  if (!f.analyzed) {
    f.lu.analyzePattern(J);
    f.analyzed = true;
  }
  f.lu.factorize(J);
  ++factorizations_;
  if (f.lu.info() != Eigen::Success) {
    f.lu.analyzePattern(J);
    f.lu.factorize(J);
  }
  f.dt = dt;
  f.valid = f.lu.info() == Eigen::Success;
  return f.valid;
}

bool ImplicitEulerSolver::solve(const FlowState& s, double dt, FlowState& out, TerminationReason* why) {
  const double t_new = s.t + dt;
  auto fail = [&](TerminationReason r) {
    if (why) *why = r;
    return false;
  };
  if (g_.path().finite_time() && !(t_new < g_.singular_time())) return fail(TerminationReason::PositivityBreakdown);

  Field v = s.u;
  if (!s.ut.empty()) {
    Field guess = s.u;
    for (std::size_t i = 0; i < guess.size(); ++i) guess[i] += dt * s.ut[i];
    if (g_.positivity(guess, t_new).ok) v = std::move(guess);
  }
  if (!g_.positivity(v, t_new).ok) return fail(TerminationReason::PositivityBreakdown);

  Field r = residual(v, s.u, t_new, dt);
  double norm = sup_norm(r);
  const int n = static_cast<int>(v.size());
  int polish = c_.polish_iters;
  ++calls_;
  Factorization* slot = nullptr;
  for (auto& f : cache_)
    if (f.valid && f.dt == dt) slot = &f;
  if (!slot) {
    slot = cache_[0].last_used <= cache_[1].last_used ? &cache_[0] : &cache_[1];
    slot->valid = false;
  }
  slot->last_used = calls_;
  double previous_chord = std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    if (norm <= c_.newton_tol && (polish <= 0 || norm > 0.25 * previous)) break;
    if (norm <= c_.newton_tol) --polish;
    previous = norm;
    if (it >= c_.max_newton_iters) {
      if (norm <= c_.newton_tol) break;
      return fail(TerminationReason::NewtonDiverged);
    }
    ++iterations_;

    // Chord iterations reuse a factorization (possibly from an earlier step with
    // the same dt) while they still contract fast.
    const bool refresh = !slot->valid || norm > 0.1 * previous_chord;
    if (refresh && !refactor(*slot, v, t_new, dt)) return fail(TerminationReason::NewtonDiverged);
    previous_chord = norm;
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
    Eigen::VectorXd delta = slot->lu.solve(rv);
    if (!delta.allFinite()) return fail(TerminationReason::NewtonDiverged);

    bool accepted = false, any_positive = false;
    double lambda = 1.0;
    const int max_halvings = norm <= c_.newton_tol ? 1 : 30;  // polishing takes full steps only
    for (int ls = 0; ls < max_halvings; ++ls, lambda *= 0.5) {
      Field cand = v;
      for (int i = 0; i < n; ++i) cand[i] -= lambda * delta[i];
      if (!g_.positivity(cand, t_new).ok) continue;
      any_positive = true;
      Field rc = residual(cand, s.u, t_new, dt);
      const double nc = sup_norm(rc);
      if (nc < norm) {
        v = std::move(cand);
        r = std::move(rc);
        norm = nc;
        accepted = true;
        break;
      }
    }
    if (!accepted && norm <= c_.newton_tol) break;
    if (!accepted && !refresh) {
      slot->valid = false;
      previous_chord = std::numeric_limits<double>::infinity();
      continue;
    }
    if (!accepted)
      return fail(any_positive ? TerminationReason::NewtonDiverged : TerminationReason::PositivityBreakdown);
  }

  out.t = t_new;
  out.u = std::move(v);
  out.ut = g_.ma_log(out.u, t_new);
  for (std::size_t i = 0; i < out.ut.size(); ++i) out.ut[i] -= out.u[i];
  return true;
}

FlowState initial_state(const ReducedGeometry& g) {
  FlowState s;
  s.t = 0.0;
  s.u.assign(g.dof(), 0.0);
  s.ut = compute_ut(s, g);
  return s;
}

FlowState implicit_euler_step(const FlowState& s, double dt, const ReducedGeometry& g, const StepController& c) {
  ImplicitEulerSolver solver(g, c);
  FlowState out;
  TerminationReason why{};
  if (!solver.solve(s, dt, out, &why)) throw PositivityBreakdown("implicit Euler step failed: " + to_string(why));
  return out;
}

AdaptiveStepper::AdaptiveStepper(const ReducedGeometry& g, const StepController& c)
    : g_(g), c_(c), solver_(g, c), dt_(c.dt_init) {}

bool AdaptiveStepper::step(FlowState& s, double t_stop, TerminationReason& why) {
  TerminationReason last_failure = TerminationReason::DtUnderflow;
  for (;;) {
    const double remaining = t_stop - s.t;
    double dt = std::min(dt_, c_.dt_max);
    bool clipped = false;
    if (dt >= remaining || remaining - dt < 1e-3 * dt) {
      dt = remaining;
      clipped = true;
    }
    if (!(dt >= c_.dt_min) && !clipped) {
      why = last_failure;
      return false;
    }
    if (dt <= 0.0) {
      why = last_failure;
      return false;
    }

    FlowState full, h1, h2;
    TerminationReason r{};
    const bool ok = solver_.solve(s, dt, full, &r) && solver_.solve(s, 0.5 * dt, h1, &r) &&
                    solver_.solve(h1, 0.5 * dt, h2, &r);
    if (!ok) {
      last_failure = r;
      ++rejected_;
      dt_ = 0.25 * dt;
      if (clipped && dt < c_.dt_min) {
        why = last_failure;
        return false;
      }
      continue;
    }
    const double err = sup_diff(full.u, h2.u);
    const double fac = err > 0.0 ? 0.9 * std::sqrt(c_.step_tol / err) : 2.0;
    if (err <= c_.step_tol) {
      FlowState next = std::move(h2);
      next.t = s.t + dt;
      if (c_.extrapolate) {
        FlowState ex;
        ex.t = next.t;
        ex.u = next.u;
        for (std::size_t i = 0; i < ex.u.size(); ++i) ex.u[i] = 2.0 * next.u[i] - full.u[i];
        if (g_.positivity(ex.u, ex.t).ok) {
          ex.ut = compute_ut(ex, g_);
          next = std::move(ex);
        }
      }
      s = std::move(next);
      last_dt_ = dt;
      // Hysteresis: keep dt (and its cached factorizations) unless it must shrink
      // or can grow by at least half.
      const double proposal = dt * std::clamp(fac, 0.2, 2.0);
      const double base = clipped ? std::max(dt_, dt) : dt;
      if (proposal < base || proposal >= 1.5 * base) dt_ = std::max(proposal, clipped ? dt_ : 0.0);
      else dt_ = base;
      return true;
    }
    ++rejected_;
    dt_ = dt * std::max(0.2, std::min(fac, 0.9));
  }
}

std::vector<double> snapshot_schedule(const ClassPath& path, const StepController& c) {
  std::vector<double> ts;
  if (path.finite_time()) {
    const double T = path.singular_time();
    const double eps = c.stop_offset;
    if (!(eps > 0.0) || !(eps < 0.5 * T)) throw ConfigError("stop_offset must lie in (0, T/2)");
    const int E = std::max(1, c.early_snapshots);
    for (int j = 1; j < E; ++j) ts.push_back(0.5 * T * j / E);
    const int m = std::max(1, c.substeps_per_halving);
    for (int j = m;; ++j) {
      const double gap = T * std::exp2(-static_cast<double>(j) / m);
      if (!(gap > eps * (1.0 + 1e-9))) break;
      ts.push_back(T - gap);
    }
    ts.push_back(T - eps);
  } else {
    if (!(c.snapshot_spacing > 0.0) || !(c.t_max > 0.0)) throw ConfigError("t_max and snapshot_spacing must be positive");
    for (int j = 1;; ++j) {
      const double t = j * c.snapshot_spacing;
      if (t > c.t_max * (1.0 - 1e-12)) break;
      ts.push_back(t);
    }
    ts.push_back(c.t_max);
  }
  const double stop = ts.back();
  for (double t : c.extra_times)
    if (t > 0.0 && t < stop) ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), ts.end());
  return ts;
}

Trajectory evolve(std::shared_ptr<const ReducedGeometry> gp, const StepController& controller) {
  const ReducedGeometry& g = *gp;
  StepController c = controller;
  if (g.path().finite_time()) c.dt_init = std::min(c.dt_init, g.singular_time() / 1000.0);

  Trajectory tr;
  tr.geometry = gp;
  tr.controller = c;
  const auto schedule = snapshot_schedule(g.path(), c);
  tr.stop_time = schedule.back();

  FlowState s = initial_state(g);
  tr.snapshots.push_back(s);
  tr.rows.push_back(compute_row(g, s, 0.0));
  tr.amgm_violations += tr.rows.back().amgm_violations;
  double first_margin = tr.rows.back().pos_margin, last_margin = first_margin;

  AdaptiveStepper stepper(g, c);
  bool stopped = false;
  for (double target : schedule) {
    while (s.t < target - 1e-14 * std::max(1.0, target)) {
      TerminationReason why{};
      if (tr.accepted_steps >= c.max_steps) {
        tr.termination = TerminationReason::DtUnderflow;
        stopped = true;
        break;
      }
      if (!stepper.step(s, target, why)) {
        tr.termination = why;
        stopped = true;
        break;
      }
      ++tr.accepted_steps;
      const PositivityCheck pc = g.positivity(s.u, s.t);
      if (!pc.ok) ++tr.positivity_violations;
      last_margin = pc.margin;
    }
    if (stopped) break;
    s.t = target;
    tr.snapshots.push_back(s);
    tr.rows.push_back(compute_row(g, s, stepper.last_dt()));
    tr.amgm_violations += tr.rows.back().amgm_violations;
  }
  if (stopped && s.t > tr.snapshots.back().t) {
    tr.snapshots.push_back(s);
    tr.rows.push_back(compute_row(g, s, stepper.last_dt()));
    tr.amgm_violations += tr.rows.back().amgm_violations;
  }
  tr.rejected_steps = stepper.rejected();
  tr.newton_iterations = stepper.newton_iterations();
  tr.factorizations = stepper.factorizations();
  if (stopped && g.path().finite_time()) {
    const double T = g.singular_time();
    tr.singularity_detected = (T - s.t) < 0.05 * T || last_margin < 1e-6 * first_margin;
  }
  return tr;
}

}  // namespace krf
