#include <cmath>
#include <optional>

#include "doctest.h"
#include "splitsys/harness.hpp"
#include "splitsys/operators.hpp"
#include "splitsys/solver.hpp"

using namespace splitsys;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

struct BruteStep {
  int j;
  double alpha;
  Vector y;
};

// literal reading of the acceptance test, tried for j = 0..20 with no shortcuts
std::optional<BruteStep> brute_linesearch(const ForwardOperator& A, const SetValuedOperator& B,
                                          const Vector& z, const Vector& J, double beta,
                                          double theta, double delta, double radius) {
  Vector d = z - J;
  for (int j = 0; j <= 20; ++j) {
    double alpha = std::pow(theta, j);
    Vector y = alpha * J + (1.0 - alpha) * z;
    Vector u;
    try {
      u = B.selection(y, radius);
    } catch (const SelectionDomainError&) {
      continue;
    }
    if ((A(y) + u).dot(d) >= (delta / beta) * d.squaredNorm()) return BruteStep{j, alpha, y};
  }
  return std::nullopt;
}

AlgoParams loose_params() {
  AlgoParams p;
  p.theta = 0.5;
  p.delta = 0.4;
  p.radius = 10.0;
  return p;
}

}  // namespace

TEST_CASE("linesearch backtracks once on the identity map") {
  ForwardOperator A = ForwardOperator::affine(Matrix::Identity(2, 2), Vector::Zero(2));
  SetValuedOperator B = SetValuedOperator::zero(2);
  Vector z = vec2(1, 0);
  Vector J = forward_backward_map(A, B, 1.0, z);
  CHECK(J.norm() == 0.0);

  AlgoParams p = loose_params();
  LinesearchResult r = linesearch(A, B, z, J, 1.0, p);
  CHECK(r.j == 1);
  CHECK(r.alpha == 0.5);
  CHECK((r.x_bar - vec2(0.5, 0)).norm() == 0.0);
  CHECK(r.u_bar.norm() == 0.0);

  auto brute = brute_linesearch(A, B, z, J, 1.0, p.theta, p.delta, p.radius);
  REQUIRE(brute.has_value());
  CHECK(brute->j == r.j);
  CHECK(brute->alpha == r.alpha);
  CHECK((brute->y - r.x_bar).norm() == 0.0);
}

TEST_CASE("linesearch accepts immediately when the step is short enough") {
  ForwardOperator A = ForwardOperator::affine(2.0 * Matrix::Identity(2, 2), Vector::Zero(2));
  SetValuedOperator B = SetValuedOperator::zero(2);
  Vector z = vec2(1, 0);
  Vector J = forward_backward_map(A, B, 0.25, z);
  CHECK((J - vec2(0.5, 0)).norm() == 0.0);

  AlgoParams p = loose_params();
  LinesearchResult r = linesearch(A, B, z, J, 0.25, p);
  CHECK(r.j == 0);
  CHECK(r.alpha == 1.0);
  CHECK((r.x_bar - J).norm() == 0.0);

  auto brute = brute_linesearch(A, B, z, J, 0.25, p.theta, p.delta, p.radius);
  REQUIRE(brute.has_value());
  CHECK(brute->j == 0);
}

TEST_CASE("linesearch refuses an already solved component") {
  ForwardOperator A = ForwardOperator::affine(Matrix::Identity(2, 2), vec2(-1, -1));
  SetValuedOperator B = SetValuedOperator::zero(2);
  Vector z = vec2(1, 1);  // the zero of A, so J equals z
  Vector J = forward_backward_map(A, B, 0.5, z);
  CHECK_THROWS_AS(linesearch(A, B, z, J, 0.5, loose_params()), ConfigError);
}

TEST_CASE("linesearch exhaustion reports the budget and skipped probes") {
  // zero forward map never satisfies the inequality and every probe past j=0
  // leaves the box, so the search must run out
  ForwardOperator A = ForwardOperator::zero(2);
  SetValuedOperator B =
      SetValuedOperator::normal_cone(ConvexSet::box(vec2(-1, -1), vec2(1, 1)));
  Vector z = vec2(1.5, 0);
  Vector J = forward_backward_map(A, B, 0.5, z);
  CHECK((J - vec2(1, 0)).norm() == 0.0);

  AlgoParams p = loose_params();
  p.max_linesearch = 10;
  try {
    linesearch(A, B, z, J, 0.5, p);
    FAIL("expected LinesearchError");
  } catch (const LinesearchError& e) {
    CHECK(e.steps_tried == 10);
    CHECK(std::string(e.what()).find("outside the operator domain") != std::string::npos);
  }
}

TEST_CASE("component_step detects a solved component") {
  ForwardOperator A = ForwardOperator::affine(Matrix::Identity(2, 2), vec2(-1, -1));
  SetValuedOperator B = SetValuedOperator::zero(2);
  ConvexSet X = ConvexSet::whole_space(2);
  ComponentStep s = component_step(A, B, X, vec2(1, 1), 0.5, loose_params());
  CHECK(s.solved);
  CHECK((s.z_next - vec2(1, 1)).norm() == 0.0);
  CHECK_FALSE(s.search.has_value());
}

TEST_CASE("component_step projects through the halfspace then X") {
  ForwardOperator A = ForwardOperator::affine(Matrix::Identity(2, 2), Vector::Zero(2));
  SetValuedOperator B = SetValuedOperator::zero(2);
  AlgoParams p = loose_params();

  ComponentStep s = component_step(A, B, ConvexSet::whole_space(2), vec2(1, 0), 1.0, p);
  CHECK_FALSE(s.solved);
  REQUIRE(s.search.has_value());
  CHECK(s.search->j == 1);
  CHECK((s.z_next - vec2(0.5, 0)).norm() <= 1e-15);

  ConvexSet X = ConvexSet::box(vec2(0.75, -1), vec2(2, 1));
  ComponentStep clamped = component_step(A, B, X, vec2(1, 0), 1.0, p);
  CHECK((clamped.z_next - vec2(0.75, 0)).norm() <= 1e-15);
}

TEST_CASE("beta schedules stay inside the bracket") {
  BetaSchedule mid;
  CHECK(mid.at(0, 0.1, 1.0) == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(mid.at(999, 0.1, 1.0) == mid.at(0, 0.1, 1.0));

  BetaSchedule fixed;
  fixed.rule = BetaSchedule::Rule::constant;
  fixed.value = 0.3;
  CHECK(fixed.at(5, 0.1, 1.0) == 0.3);

  BetaSchedule sweep;
  sweep.rule = BetaSchedule::Rule::geometric_sweep;
  sweep.period = 8;
  CHECK(sweep.at(0, 0.1, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(sweep.at(7, 0.1, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sweep.at(8, 0.1, 1.0) == sweep.at(0, 0.1, 1.0));
  CHECK(sweep.at(3, 0.1, 1.0) == doctest::Approx(0.1 * std::pow(10.0, 3.0 / 7.0)).epsilon(1e-12));
  for (long k = 0; k < 40; ++k) {
    double b = sweep.at(k, 0.1, 1.0);
    CHECK(b >= 0.1 - 1e-15);
    CHECK(b <= 1.0 + 1e-15);
  }
}

TEST_CASE("AlgoParams validation") {
  CHECK_NOTHROW(AlgoParams{}.validate());

  auto reject = [](auto&& tweak) {
    AlgoParams p;
    tweak(p);
    CHECK_THROWS_AS(p.validate(), ConfigError);
  };
  reject([](AlgoParams& p) { p.beta_lo = 0.0; });
  reject([](AlgoParams& p) { p.beta_hi = 0.05; });
  reject([](AlgoParams& p) { p.theta = 1.0; });
  reject([](AlgoParams& p) { p.delta = 0.0; });
  reject([](AlgoParams& p) { p.delta = 1.5; });
  reject([](AlgoParams& p) { p.tol_outer = 0.0; });
  reject([](AlgoParams& p) { p.tol_component = -1e-9; });
  reject([](AlgoParams& p) { p.max_outer = 0; });
  reject([](AlgoParams& p) { p.max_linesearch = 0; });
  reject([](AlgoParams& p) {
    p.beta_schedule.rule = BetaSchedule::Rule::constant;
    p.beta_schedule.value = 2.0;  // outside [beta_lo, beta_hi]
  });
}

TEST_CASE("solve drives a single affine component to its zero") {
  ProblemInstance inst;
  inst.n = 2;
  inst.components.push_back({ForwardOperator::affine(Matrix::Identity(2, 2), vec2(-3, 2)),
                             SetValuedOperator::zero(2)});
  inst.X = ConvexSet::whole_space(2);
  inst.known_solution = vec2(3, -2);
  inst.name = "single_affine";

  SolveResult r = solve(inst, AlgoParams{}, vec2(10, 10));
  CHECK(r.status == SolveStatus::solved);
  CHECK((r.x - vec2(3, -2)).norm() <= 1e-5);
  CHECK(r.trace.final_residual() <= 1e-6);
  CHECK(r.trace.iterations.size() == static_cast<std::size_t>(r.trace.iterations_count()) + 1);
  CHECK(std::string(to_string(r.status)) == "solved");
}

TEST_CASE("solve stops immediately at a planted solution") {
  ProblemInstance inst = generate_planted_system(2, 1, 3, Structure::affine_vi);
  SolveResult r = solve(inst, AlgoParams{}, *inst.known_solution);
  CHECK(r.status == SolveStatus::solved);
  CHECK(r.trace.stop_reason == StopReason::all_components_solved);
  CHECK(r.trace.iterations.size() == 1);
  CHECK(r.trace.iterations_count() == 0);
  for (int j : r.trace.iterations.front().linesearch_j) CHECK(j == -1);
}

TEST_CASE("solve reports the iteration cap") {
  ProblemInstance inst = generate_planted_system(2, 1, 3, Structure::affine_vi);
  AlgoParams p;
  p.max_outer = 1;
  SolveResult r = solve(inst, p, default_start(inst, 99));
  CHECK(r.status == SolveStatus::max_iterations);
  CHECK(r.trace.stop_reason == StopReason::none);
  CHECK(r.trace.iterations.size() == 2);
}

TEST_CASE("solve keeps every iterate inside X") {
  ProblemInstance inst = generate_planted_system(10, 2, 6, Structure::affine_vi);
  SolveResult r = solve(inst, AlgoParams{}, default_start(inst, 6));
  CHECK(r.status == SolveStatus::solved);
  for (const IterationRecord& rec : r.trace.iterations) CHECK(inst.X.distance(rec.x) <= 1e-8);
  CHECK(r.trace.feasibility_violations == 0);
}

TEST_CASE("solve under verify mode raises no invariant flags") {
  ProblemInstance inst = generate_planted_system(10, 2, 11, Structure::mixed_l1);
  SolveOptions opts;
  opts.verify = true;
  SolveResult r = solve(inst, AlgoParams{}, default_start(inst, 11), opts);
  CHECK(r.status == SolveStatus::solved);
  CHECK(r.trace.fejer_outer_violations == 0);
  CHECK(r.trace.fejer_chain_violations == 0);
  CHECK(r.trace.containment_violations == 0);
  CHECK(r.trace.accepted_step_violations == 0);
}

TEST_CASE("solve is deterministic") {
  ProblemInstance inst = generate_planted_system(10, 5, 8, Structure::affine_vi);
  Vector x0 = default_start(inst, 8);
  SolveResult a = solve(inst, AlgoParams{}, x0);
  SolveResult b = solve(inst, AlgoParams{}, x0);
  REQUIRE(a.trace.iterations.size() == b.trace.iterations.size());
  for (std::size_t i = 0; i < a.trace.iterations.size(); ++i) {
    CHECK((a.trace.iterations[i].x - b.trace.iterations[i].x).norm() == 0.0);
    CHECK(a.trace.iterations[i].residual == b.trace.iterations[i].residual);
  }
}

TEST_CASE("baseline forward-backward on friendly and hostile steps") {
  ProblemInstance easy;
  easy.n = 2;
  easy.components.push_back({ForwardOperator::affine(Matrix::Identity(2, 2), vec2(-1, 2)),
                             SetValuedOperator::zero(2)});
  easy.X = ConvexSet::whole_space(2);
  easy.name = "easy";
  SolveResult ok = solve_baseline_fb(easy, 0.5, vec2(5, 5), 200, 1e-9);
  CHECK(ok.status == SolveStatus::solved);
  CHECK((ok.x - vec2(1, -2)).norm() <= 1e-8);

  // step 0.05 against slope 100 flips sign and grows 4x per pass
  ProblemInstance stiff;
  stiff.n = 1;
  stiff.components.push_back({ForwardOperator::affine(100.0 * Matrix::Identity(1, 1), Vector::Zero(1)),
                              SetValuedOperator::zero(1)});
  stiff.X = ConvexSet::whole_space(1);
  stiff.name = "stiff";
  SolveResult bad = solve_baseline_fb(stiff, 0.05, vec1(1), 100, 1e-9);
  CHECK(bad.status == SolveStatus::max_iterations);
  CHECK(bad.trace.failure_detail == "iterates diverged");
  CHECK(bad.trace.iterations.back().residual > 1e6);

  // pure projection problem lands in one application
  ProblemInstance proj;
  proj.n = 2;
  proj.components.push_back(
      {ForwardOperator::zero(2),
       SetValuedOperator::normal_cone(ConvexSet::box(vec2(-1, -1), vec2(1, 1)))});
  proj.X = ConvexSet::whole_space(2);
  proj.name = "proj";
  SolveResult one = solve_baseline_fb(proj, 0.7, vec2(4, 0.5), 50, 1e-12);
  CHECK(one.status == SolveStatus::solved);
  CHECK((one.x - vec2(1, 0.5)).norm() == 0.0);
  CHECK(one.trace.iterations_count() == 1);
}
