#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splitsys/instance.hpp"

namespace splitsys {

/// Outcome of one sampled property check.
struct CheckResult {
  std::string name;
  bool passed = true;
  long samples = 0;
  long failures = 0;
  double worst = 0.0;     // largest observed violation magnitude
  std::string witness;    // serialized worst-case sample, empty when passed

  void record(double violation, const std::string& detail);
};

struct CheckReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  const CheckResult* first_failure() const;
};

std::string format_vector(const Vector& v);

/// <A(x)-A(y), x-y> >= -1e-10 over random pairs in the box.
CheckResult check_forward_monotone(const ForwardOperator& A, const BoxRegion& box, long pairs,
                                   std::uint64_t seed);

/// ||res(b,x)-res(b,y)||^2 <= <res(b,x)-res(b,y), x-y> + 1e-9 over random
/// pairs and random beta in [beta_lo, beta_hi].
CheckResult check_resolvent_firm(const SetValuedOperator& B, const BoxRegion& box, long pairs,
                                 std::uint64_t seed, double beta_lo, double beta_hi);

/// Normal-cone resolvents ignore beta: res(b1,x) = res(b2,x) within 1e-12
/// over random x and random beta pairs, and both equal the set projection.
CheckResult check_resolvent_beta_free(const SetValuedOperator& B, const BoxRegion& box,
                                      long samples, std::uint64_t seed);

/// ||P(x)-P(y)||^2 <= ||x-y||^2 - ||(P(x)-x)-(P(y)-y)||^2 + 1e-9.
CheckResult check_projection_contraction(const ConvexSet& C, const BoxRegion& box, long pairs,
                                         std::uint64_t seed);

/// <x-P(x), c-P(x)> <= 1e-10 for random x and random set members c.
CheckResult check_projection_obtuse(const ConvexSet& C, const BoxRegion& box, long samples,
                                    std::uint64_t seed);

/// P(P(x)) = P(x) within 1e-12 and P(x) lies in the set within 1e-10.
CheckResult check_projection_idempotent(const ConvexSet& C, const BoxRegion& box, long samples,
                                        std::uint64_t seed);

/// ||selection(x, R)|| <= R + 1e-12 at random domain points.
CheckResult check_selection_bound(const SetValuedOperator& B, const BoxRegion& box, long samples,
                                  std::uint64_t seed, double radius);

/// v = (x - res(b,x))/b must belong to B(res(b,x)): tested through
/// monotonicity against selections drawn at other domain points.
CheckResult check_graph_consistency(const SetValuedOperator& B, const BoxRegion& box, long samples,
                                    std::uint64_t seed, double radius);

/// ||x* - fb_map(A_i,B_i,beta,x*)|| <= 1e-9 for each component across betas.
CheckResult check_known_solution_fixed(const ProblemInstance& instance, double beta_lo,
                                       double beta_hi);

struct VerifyConfig {
  long pairs = 1000;        // sample pairs per operator/set check
  long betas = 100;         // random betas for the beta-independence check
  std::uint64_t seed = 20240901ull;
  double beta_lo = 0.1;
  double beta_hi = 1.0;
  long solve_iterations = 400;  // cap for the instrumented solve pass
};

/// Full battery for one instance: every operator and set plus, when a known
/// solution is present, the fixed-point and instrumented-solve checks.
CheckReport verify_instance(const ProblemInstance& instance, const VerifyConfig& config = {});

}  // namespace splitsys
