#include "splitsys/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "splitsys/geometry.hpp"
#include "splitsys/operators.hpp"

namespace splitsys {

double BetaSchedule::at(long k, double lo, double hi) const {
  switch (rule) {
    case Rule::constant_midpoint:
      return 0.5 * (lo + hi);
    case Rule::constant:
      return value;
    case Rule::geometric_sweep: {
      int p = std::max(period, 1);
      long t = k % p;
      if (p == 1) return lo;
      return lo * std::pow(hi / lo, static_cast<double>(t) / (p - 1));
    }
  }
  return 0.5 * (lo + hi);
}

std::string BetaSchedule::describe() const {
  switch (rule) {
    case Rule::constant_midpoint:
      return "constant_midpoint";
    case Rule::constant: {
      std::ostringstream os;
      os << "constant(" << value << ")";
      return os.str();
    }
    case Rule::geometric_sweep: {
      std::ostringstream os;
      os << "geometric_sweep(period=" << period << ")";
      return os.str();
    }
  }
  return "?";
}

void AlgoParams::validate() const {
  if (!(beta_lo > 0.0) || !std::isfinite(beta_lo)) throw ConfigError("beta_lo must be positive");
  if (!(beta_hi >= beta_lo) || !std::isfinite(beta_hi))
    throw ConfigError("beta_hi must satisfy beta_hi >= beta_lo");
  if (!(theta > 0.0) || !(theta < 1.0)) throw ConfigError("theta must lie in (0,1)");
  if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  if (!std::isfinite(radius) || radius < 0.0) throw ConfigError("radius must be >= 0");
  if (!(tol_component > 0.0)) throw ConfigError("tol_component must be positive");
  if (!(tol_outer > 0.0)) throw ConfigError("tol_outer must be positive");
  if (max_outer < 1) throw ConfigError("max_outer must be >= 1");
  if (max_linesearch < 1) throw ConfigError("max_linesearch must be >= 1");
  if (beta_schedule.rule == BetaSchedule::Rule::constant) {
    if (beta_schedule.value < beta_lo || beta_schedule.value > beta_hi)
      throw ConfigError("constant beta must lie in [beta_lo, beta_hi]");
  }
  if (beta_schedule.rule == BetaSchedule::Rule::geometric_sweep && beta_schedule.period < 1)
    throw ConfigError("beta sweep period must be >= 1");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved:
      return "solved";
    case SolveStatus::max_iterations:
      return "max_iterations";
    case SolveStatus::linesearch_failure:
      return "linesearch_failure";
  }
  return "?";
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::none:
      return "none";
    case StopReason::all_components_solved:
      return "all_components_solved";
    case StopReason::residual_below_tol:
      return "residual_below_tol";
  }
  return "?";
}

long IterationRecord::linesearch_total() const {
  long total = 0;
  for (int j : linesearch_j)
    if (j >= 0) total += j + 1;  // j+1 probes were evaluated to accept exponent j
  return total;
}

double SolveTrace::final_residual() const {
  return iterations.empty() ? std::numeric_limits<double>::quiet_NaN()
                            : iterations.back().residual;
}

LinesearchResult linesearch(const ForwardOperator& A, const SetValuedOperator& B, const Vector& z,
                            const Vector& J, double beta, const AlgoParams& params) {
  if (!(beta > 0.0)) throw ConfigError("linesearch: beta must be positive");
  if (!(params.radius > 0.0)) throw ConfigError("linesearch: selection radius must be positive");
  require_dim(J, z.size(), "linesearch J");

  const Vector diff = z - J;
  if (diff.norm() <= params.tol_component)
    throw ConfigError("linesearch: component already solved at z, nothing to search");
  const double rhs = (params.delta / beta) * diff.squaredNorm();

  double alpha = 1.0;  // theta^j, so y starts at J and backtracks toward z
  int skipped = 0;
  for (int j = 0; j < params.max_linesearch; ++j) {
    const Vector y = alpha * J + (1.0 - alpha) * z;
    try {
      Vector u = B.selection(y, params.radius);
      Vector a = A(y);
      if ((a + u).dot(diff) >= rhs) {
        LinesearchResult out;
        out.j = j;
        out.alpha = alpha;
        out.u_bar = std::move(u);
        out.x_bar = y;
        out.a_at_x_bar = std::move(a);
        return out;
      }
    } catch (const SelectionDomainError&) {
      ++skipped;  // probe fell outside dom(B); shrink further toward z
    }
    alpha *= params.theta;
  }
  std::ostringstream os;
  os << "linesearch exhausted " << params.max_linesearch << " steps (" << skipped
     << " probes outside the operator domain, ||z-J|| = " << diff.norm() << ")";
  throw LinesearchError(os.str(), params.max_linesearch);
}

ComponentStep component_step(const ForwardOperator& A, const SetValuedOperator& B,
                             const ConvexSet& X, const Vector& z, double beta,
                             const AlgoParams& params) {
  ComponentStep out;
  const Vector J = forward_backward_map(A, B, beta, z);
  out.residual = (z - J).norm();
  if (out.residual <= params.tol_component) {
    out.z_next = z;
    out.solved = true;
    return out;
  }
  LinesearchResult ls = linesearch(A, B, z, J, beta, params);
  const Vector w = ls.a_at_x_bar + ls.u_bar;
  if (w.norm() <= 1e-14) {
    // x_bar is itself a zero of A + B; the cut degenerates to the whole space.
    out.z_next = z;
    out.solved = true;
    out.search = std::move(ls);
    return out;
  }
  const Halfspace cut{w, ls.x_bar};
  out.z_next = X.project(project_halfspace(cut, z));
  out.search = std::move(ls);
  return out;
}

namespace {

// Slacks for the runtime checks, matched to what the test harness asserts.
constexpr double kFejerSlack = 1e-10;
constexpr double kContainmentSlack = 1e-9;
constexpr double kAcceptedStepSlack = 1e-10;

void flag(long& counter, bool verify, const std::string& what) {
  ++counter;
  if (verify) throw VerifyError(what);
}

}  // namespace

SolveResult solve(const ProblemInstance& instance, const AlgoParams& params, const Vector& x0,
                  const SolveOptions& options) {
  params.validate();
  require_dim(x0, instance.n, "solve x0");
  if (!is_finite(x0)) throw ConfigError("solve: x0 has non-finite entries");
  if (instance.components.empty()) throw ConfigError("solve: instance has no components");

  AlgoParams eff = params;
  if (eff.radius <= 0.0) eff.radius = instance.radius_R;
  if (!(eff.radius > 0.0)) throw ConfigError("solve: no positive selection radius available");

  SolveResult result;
  SolveTrace& trace = result.trace;

  Vector x = x0;
  if (!instance.X.contains(x, 1e-12)) {
    x = instance.X.project(x);
    trace.x0_projected = true;
  }

  const bool have_star = instance.known_solution.has_value();
  const Vector* star = have_star ? &*instance.known_solution : nullptr;

  for (long k = 0; k <= eff.max_outer; ++k) {
    const double beta = eff.beta_schedule.at(k, eff.beta_lo, eff.beta_hi);
    const auto tick = std::chrono::steady_clock::now();

    IterationRecord rec;
    rec.k = k;
    rec.x = x;
    rec.beta = beta;
    rec.residual = residual(instance, beta, x);
    if (have_star) rec.dist_to_solution = (x - *star).norm();

    if (k == eff.max_outer) {
      // Terminal row: the budget is spent, record where we stopped.
      trace.iterations.push_back(std::move(rec));
      trace.status = SolveStatus::max_iterations;
      trace.stop_reason = StopReason::none;
      break;
    }

    Vector z = x;
    bool all_solved = true;
    bool failed = false;
    for (std::size_t i = 0; i < instance.components.size(); ++i) {
      const Component& comp = instance.components[i];
      ComponentStep step;
      try {
        step = component_step(comp.A, comp.B, instance.X, z, beta, eff);
      } catch (const LinesearchError& e) {
        trace.status = SolveStatus::linesearch_failure;
        trace.failed_component = static_cast<int>(i);
        std::ostringstream os;
        os << "component " << i << " at iteration " << k << ": " << e.what();
        trace.failure_detail = os.str();
        failed = true;
        break;
      }

      rec.component_residuals.push_back(step.residual);
      rec.linesearch_j.push_back(step.search ? step.search->j : -1);
      if (step.search) {
        trace.total_linesearch_steps += step.search->j + 1;
        trace.max_linesearch_j = std::max(trace.max_linesearch_j, step.search->j);

        const Vector w = step.search->a_at_x_bar + step.search->u_bar;
        // Accepted-step lower bound: <w, z - x_bar> >= alpha*(delta/beta_hi)*||z-J||^2.
        const double lhs = w.dot(z - step.search->x_bar);
        const double lower =
            step.search->alpha * (eff.delta / eff.beta_hi) * step.residual * step.residual;
        if (lhs < lower - kAcceptedStepSlack)
          flag(trace.accepted_step_violations, options.verify,
               "accepted linesearch step violates its lower bound");
        if (have_star && !step.solved) {
          // The cut must keep every solution on its non-positive side.
          const double side = w.dot(*star - step.search->x_bar);
          if (side > kContainmentSlack)
            flag(trace.containment_violations, options.verify,
                 "separating halfspace excludes the known solution");
        }
      }

      if (!step.solved) {
        all_solved = false;
        if (have_star) {
          const double before = (z - *star).norm();
          const double after = (step.z_next - *star).norm();
          if (after > before + kFejerSlack)
            flag(trace.fejer_chain_violations, options.verify,
                 "projection step moved away from the known solution");
        }
        if (!instance.X.contains(step.z_next, 1e-8))
          flag(trace.feasibility_violations, options.verify,
               "sweep iterate left the feasible set");
        z = std::move(step.z_next);
      }
    }

    rec.time_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - tick)
                      .count();
    trace.iterations.push_back(std::move(rec));
    if (failed) break;

    if (all_solved) {
      // Every component certified x directly; no projection moved it.
      trace.status = SolveStatus::solved;
      trace.stop_reason = StopReason::all_components_solved;
      break;
    }
    if (trace.iterations.back().residual <= eff.tol_outer) {
      trace.status = SolveStatus::solved;
      trace.stop_reason = StopReason::residual_below_tol;
      break;
    }

    if (have_star) {
      const double before = (x - *star).norm();
      const double after = (z - *star).norm();
      if (after > before + kFejerSlack)
        flag(trace.fejer_outer_violations, options.verify,
             "outer iterate moved away from the known solution");
    }
    x = std::move(z);
  }

  result.status = trace.status;
  result.x = std::move(x);
  return result;
}

SolveResult solve_baseline_fb(const ProblemInstance& instance, double step, const Vector& x0,
                              long max_iter, double tol) {
  if (instance.m() != 1)
    throw ConfigError("baseline forward-backward handles single-component systems only");
  if (!(step > 0.0)) throw ConfigError("baseline step must be positive");
  if (max_iter < 1) throw ConfigError("baseline max_iter must be >= 1");
  require_dim(x0, instance.n, "baseline x0");

  const ForwardOperator& A = instance.components[0].A;
  const SetValuedOperator& B = instance.components[0].B;

  SolveResult result;
  SolveTrace& trace = result.trace;
  Vector x = x0;

  for (long k = 0; k <= max_iter; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.x = x;
    rec.beta = step;
    if (instance.known_solution) rec.dist_to_solution = (x - *instance.known_solution).norm();

    if (!is_finite(x) || x.norm() > 1e12) {
      rec.residual = std::numeric_limits<double>::infinity();
      trace.iterations.push_back(std::move(rec));
      trace.status = SolveStatus::max_iterations;
      trace.failure_detail = "iterates diverged";
      break;
    }

    const Vector next = forward_backward_map(A, B, step, x);
    rec.residual = (x - next).norm();
    trace.iterations.push_back(std::move(rec));

    if (trace.iterations.back().residual <= tol) {
      trace.status = SolveStatus::solved;
      trace.stop_reason = StopReason::residual_below_tol;
      break;
    }
    if (k == max_iter) {
      trace.status = SolveStatus::max_iterations;
      break;
    }
    x = next;
  }

  result.status = trace.status;
  result.x = std::move(x);
  return result;
}

}  // namespace splitsys
