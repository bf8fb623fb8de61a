#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splitsys/instance.hpp"
#include "splitsys/solver.hpp"

namespace splitsys {

enum class Structure { affine_vi, mixed_l1 };

const char* to_string(Structure s);
Structure structure_from_string(const std::string& name);

struct GeneratorConfig {
  Index n = 2;
  Index m = 1;
  std::uint64_t seed = 1;
  Structure structure = Structure::affine_vi;
};

/// Builds a random system whose components all vanish at one planted point.
///
/// affine_vi: every component is an affine map A_i(x) = M_i(x - x*) paired
/// with the normal cone of a box or ball holding x* strictly inside, so
/// A_i(x*) = 0 and N(x*) contains 0. mixed_l1: component 0 becomes a
/// least-squares map W^T(Wx - b) against a scaled l1 subdifferential, with b
/// back-solved so x* stays the exact fixed point; remaining components are
/// affine_vi style. X is a box around x* sized to fit inside every cone set.
///
/// The spectra are shaped so each system keeps one common slow direction;
/// that pins the asymptotic rate, which the convergence diagnostics rely on.
ProblemInstance generate_planted_system(const GeneratorConfig& config);
ProblemInstance generate_planted_system(Index n, Index m, std::uint64_t seed, Structure structure);

/// Independent reference solver: round-robin forward-backward passes with
/// diminishing steps step0/sqrt(t), no linesearch, no halfspace cuts. Throws
/// OracleError when the final residual stays above 1e-4. For n <= 2 the
/// answer is cross-checked against a dense residual grid search.
Vector oracle_solve(const ProblemInstance& instance, long rounds = 20000, double step0 = 0.45);

/// Exhaustive lattice minimizer of residual(., 0.55, x) over the bounding
/// box of X at the given spacing. Dimension must be 1 or 2.
Vector grid_search_solve(const ProblemInstance& instance, double resolution);

/// Deterministic start point: a seeded uniform draw over the bounding box of
/// X, projected onto X.
Vector default_start(const ProblemInstance& instance, std::uint64_t seed);

struct Metrics {
  SolveStatus status = SolveStatus::max_iterations;
  StopReason stop_reason = StopReason::none;
  long iterations = 0;
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  long total_linesearch_steps = 0;
  int max_linesearch_j = 0;
  long fejer_violations = 0;  // recomputed from the iterate sequence
  long chain_violations = 0;
  long containment_violations = 0;
  long accepted_step_violations = 0;
  std::vector<double> dist_to_solution;
  double wall_time_ms = 0.0;  // volatile
  bool x0_projected = false;
};

/// Distills a trace: totals, and a recount of the distance monotonicity
/// ||x^{k+1}-x*|| <= ||x^k-x*|| + 1e-10 straight from the stored iterates.
Metrics evaluate_run(const SolveTrace& trace, const ProblemInstance& instance);

/// The fixed 20-cell benchmark grid: seeds 1..20 crossed over n in {2,10,50},
/// m in {1,2,5} and both structures.
std::vector<GeneratorConfig> acceptance_suite();

}  // namespace splitsys
