#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "splitsys/instance.hpp"

namespace splitsys {

/// Rule producing the step size beta_k within [beta_lo, beta_hi].
struct BetaSchedule {
  enum class Rule { constant_midpoint, constant, geometric_sweep };
  Rule rule = Rule::constant_midpoint;
  double value = 0.0;  // for Rule::constant
  int period = 8;      // for Rule::geometric_sweep

  double at(long k, double lo, double hi) const;
  std::string describe() const;
};

struct AlgoParams {
  double beta_lo = 0.1;
  double beta_hi = 1.0;
  BetaSchedule beta_schedule;
  double theta = 0.5;
  double delta = 0.5;
  double radius = 0.0;        // selection bound R; <= 0 means "use the instance's"
  double tol_component = 1e-9;  // per-component solve test ||z - J|| <= tol_component
  double tol_outer = 1e-6;      // global residual stop
  long max_outer = 100000;
  int max_linesearch = 60;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Accepted backtracking step: exponent j, damping alpha = theta^j, the
/// selection u_bar drawn at the accepted probe, and the probe point x_bar.
struct LinesearchResult {
  int j = 0;
  double alpha = 1.0;
  Vector u_bar;
  Vector x_bar;
  Vector a_at_x_bar;  // forward map at x_bar, reused for the halfspace normal
};

enum class SolveStatus { solved, max_iterations, linesearch_failure };
enum class StopReason { none, all_components_solved, residual_below_tol };

const char* to_string(SolveStatus s);
const char* to_string(StopReason r);

/// Per-outer-iteration record. time_ms is volatile (excluded from
/// determinism comparisons); everything else is a pure function of inputs.
struct IterationRecord {
  long k = 0;
  Vector x;                 // iterate opening the sweep
  double residual = 0.0;    // system residual at x, step beta
  double beta = 0.0;
  std::vector<double> component_residuals;  // ||z_i - J_i|| along the sweep
  std::vector<int> linesearch_j;            // accepted exponent, -1 for solved components
  double dist_to_solution = std::numeric_limits<double>::quiet_NaN();
  double time_ms = 0.0;

  long linesearch_total() const;
};

struct SolveTrace {
  std::vector<IterationRecord> iterations;
  SolveStatus status = SolveStatus::max_iterations;
  StopReason stop_reason = StopReason::none;
  int failed_component = -1;   // set on linesearch_failure
  std::string failure_detail;
  bool x0_projected = false;

  // Runtime invariant counters, maintained while the run progresses.
  // Solution-relative checks require a known solution on the instance.
  long fejer_chain_violations = 0;       // intra-sweep distance chain
  long fejer_outer_violations = 0;       // outer iterate distances
  long containment_violations = 0;       // separating halfspace loses the solution
  long accepted_step_violations = 0;     // accepted-step inequality fails
  long feasibility_violations = 0;       // sweep iterate left X
  long total_linesearch_steps = 0;       // sum of accepted exponents
  int max_linesearch_j = 0;

  long iterations_count() const { return iterations.empty() ? 0 : iterations.back().k; }
  double final_residual() const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::max_iterations;
  Vector x;
  SolveTrace trace;
};

struct SolveOptions {
  bool verify = false;  // fail fast (throw VerifyError) on any invariant violation
};

/// Backtracking search along the segment from J toward z: the probe
/// y_j = theta^j J + (1 - theta^j) z starts at J and approaches z. Accepts
/// the smallest j with <A(y_j) + u_j, z - J> >= (delta/beta) ||z - J||^2,
/// where u_j is the bounded selection at y_j. One forward evaluation and one
/// selection per tried j; the resolvent J is never recomputed here.
/// Probes outside dom(B) are skipped. Throws LinesearchError when the budget
/// params.max_linesearch is exhausted.
LinesearchResult linesearch(const ForwardOperator& A, const SetValuedOperator& B, const Vector& z,
                            const Vector& J, double beta, const AlgoParams& params);

struct ComponentStep {
  Vector z_next;
  bool solved = false;
  std::optional<LinesearchResult> search;
  double residual = 0.0;  // ||z - J||
};

/// One component update: forward-backward point, solved test, linesearch,
/// then the double projection P_X(P_H(z)). A degenerate halfspace normal
/// (||A(x_bar) + u_bar|| <= 1e-14) certifies the component solved at x_bar
/// and leaves z unchanged.
ComponentStep component_step(const ForwardOperator& A, const SetValuedOperator& B,
                             const ConvexSet& X, const Vector& z, double beta,
                             const AlgoParams& params);

/// Outer loop: sweep the components from z_1 = x^k, take x^{k+1} as the end
/// of the chain, stop when a full sweep marks every component solved, when
/// the residual falls below tol_outer, or at max_outer.
SolveResult solve(const ProblemInstance& instance, const AlgoParams& params, const Vector& x0,
                  const SolveOptions& options = {});

/// Fixed-step forward-backward iteration x <- (I+step B)^{-1}(I-step A)x for
/// single-component systems. No linesearch, no safeguards; diverges when the
/// step is too large for the operator's Lipschitz modulus.
SolveResult solve_baseline_fb(const ProblemInstance& instance, double step, const Vector& x0,
                              long max_iter, double tol);

}  // namespace splitsys
