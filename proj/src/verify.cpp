#include "splitsys/verify.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "splitsys/operators.hpp"
#include "splitsys/solver.hpp"

namespace splitsys {

void CheckResult::record(double violation, const std::string& detail) {
  passed = false;
  ++failures;
  if (violation >= worst) {
    worst = violation;
    witness = detail;
  }
}

bool CheckReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

const CheckResult* CheckReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os << std::setprecision(10) << "[";
  for (Index j = 0; j < v.size(); ++j) {
    if (j) os << ", ";
    os << v[j];
  }
  os << "]";
  return os.str();
}

namespace {

Vector sample_in(const BoxRegion& box, std::mt19937_64& rng) {
  Vector x(box.dim());
  for (Index j = 0; j < box.dim(); ++j) {
    std::uniform_real_distribution<double> d(box.lo[j], box.hi[j]);
    x[j] = d(rng);
  }
  return x;
}

BoxRegion inflate(const BoxRegion& box, double amount) {
  return {(box.lo.array() - amount).matrix(), (box.hi.array() + amount).matrix()};
}

std::string pair_witness(const Vector& x, const Vector& y, double violation) {
  std::ostringstream os;
  os << "x=" << format_vector(x) << " y=" << format_vector(y) << " violation="
     << std::setprecision(6) << violation;
  return os.str();
}

std::string point_witness(const Vector& x, double violation) {
  std::ostringstream os;
  os << "x=" << format_vector(x) << " violation=" << std::setprecision(6) << violation;
  return os.str();
}

}  // namespace

CheckResult check_forward_monotone(const ForwardOperator& A, const BoxRegion& box, long pairs,
                                   std::uint64_t seed) {
  CheckResult r;
  r.name = "forward_monotone";
  std::mt19937_64 rng(seed);
  for (long s = 0; s < pairs; ++s) {
    const Vector x = sample_in(box, rng);
    const Vector y = sample_in(box, rng);
    const double inner = (A(x) - A(y)).dot(x - y);
    ++r.samples;
    if (inner < -1e-10) r.record(-inner, pair_witness(x, y, inner));
  }
  return r;
}

CheckResult check_resolvent_firm(const SetValuedOperator& B, const BoxRegion& box, long pairs,
                                 std::uint64_t seed, double beta_lo, double beta_hi) {
  CheckResult r;
  r.name = "resolvent_firm";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> betas(beta_lo, beta_hi);
  for (long s = 0; s < pairs; ++s) {
    const Vector x = sample_in(box, rng);
    const Vector y = sample_in(box, rng);
    const double beta = betas(rng);
    const Vector d = B.resolvent(beta, x) - B.resolvent(beta, y);
    const double gap = d.squaredNorm() - d.dot(x - y);
    ++r.samples;
    if (gap > 1e-9) r.record(gap, pair_witness(x, y, gap));
  }
  return r;
}

CheckResult check_resolvent_beta_free(const SetValuedOperator& B, const BoxRegion& box,
                                      long samples, std::uint64_t seed) {
  CheckResult r;
  r.name = "resolvent_beta_free";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> betas(1e-3, 50.0);
  for (long s = 0; s < samples; ++s) {
    const Vector x = sample_in(box, rng);
    const double b1 = betas(rng);
    const double b2 = betas(rng);
    const Vector r1 = B.resolvent(b1, x);
    const Vector r2 = B.resolvent(b2, x);
    double gap = (r1 - r2).norm();
    if (B.kind() == SetValuedOperator::Kind::normal_cone)
      gap = std::max(gap, (r1 - B.set().project(x)).norm());
    ++r.samples;
    if (gap > 1e-12) r.record(gap, point_witness(x, gap));
  }
  return r;
}

CheckResult check_projection_contraction(const ConvexSet& C, const BoxRegion& box, long pairs,
                                         std::uint64_t seed) {
  CheckResult r;
  r.name = "projection_contraction";
  std::mt19937_64 rng(seed);
  for (long s = 0; s < pairs; ++s) {
    const Vector x = sample_in(box, rng);
    const Vector y = sample_in(box, rng);
    const Vector px = C.project(x);
    const Vector py = C.project(y);
    const double gap =
        (px - py).squaredNorm() + ((px - x) - (py - y)).squaredNorm() - (x - y).squaredNorm();
    ++r.samples;
    if (gap > 1e-9) r.record(gap, pair_witness(x, y, gap));
  }
  return r;
}

CheckResult check_projection_obtuse(const ConvexSet& C, const BoxRegion& box, long samples,
                                    std::uint64_t seed) {
  CheckResult r;
  r.name = "projection_obtuse";
  std::mt19937_64 rng(seed);
  for (long s = 0; s < samples; ++s) {
    const Vector x = sample_in(box, rng);
    const Vector member = C.project(sample_in(box, rng));
    const Vector px = C.project(x);
    const double inner = (x - px).dot(member - px);
    ++r.samples;
    if (inner > 1e-10) r.record(inner, pair_witness(x, member, inner));
  }
  return r;
}

CheckResult check_projection_idempotent(const ConvexSet& C, const BoxRegion& box, long samples,
                                        std::uint64_t seed) {
  CheckResult r;
  r.name = "projection_idempotent";
  std::mt19937_64 rng(seed);
  for (long s = 0; s < samples; ++s) {
    const Vector x = sample_in(box, rng);
    const Vector px = C.project(x);
    const double drift = (C.project(px) - px).norm();
    const double outside = C.distance(px);
    ++r.samples;
    if (drift > 1e-12 || outside > 1e-10)
      r.record(std::max(drift, outside), point_witness(x, std::max(drift, outside)));
  }
  return r;
}

CheckResult check_selection_bound(const SetValuedOperator& B, const BoxRegion& box, long samples,
                                  std::uint64_t seed, double radius) {
  CheckResult r;
  r.name = "selection_bound";
  std::mt19937_64 rng(seed);
  for (long s = 0; s < samples; ++s) {
    Vector x = sample_in(box, rng);
    if (B.kind() == SetValuedOperator::Kind::normal_cone) x = B.set().project(x);
    ++r.samples;
    try {
      const double norm = B.selection(x, radius).norm();
      if (norm > radius + 1e-12) r.record(norm - radius, point_witness(x, norm - radius));
    } catch (const SelectionDomainError& e) {
      r.record(0.0, point_witness(x, 0.0) + " unexpected domain error: " + e.what());
    }
  }
  return r;
}

CheckResult check_graph_consistency(const SetValuedOperator& B, const BoxRegion& box, long samples,
                                    std::uint64_t seed, double radius) {
  CheckResult r;
  r.name = "graph_consistency";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> betas(0.1, 1.0);
  for (long s = 0; s < samples; ++s) {
    const Vector x = sample_in(box, rng);
    const double beta = betas(rng);
    const Vector res = B.resolvent(beta, x);
    const Vector v = (x - res) / beta;  // belongs to B(res) by the resolvent identity
    Vector y = sample_in(box, rng);
    if (B.kind() == SetValuedOperator::Kind::normal_cone) y = B.set().project(y);
    ++r.samples;
    try {
      const Vector u = B.selection(y, radius);
      const double inner = (v - u).dot(res - y);
      if (inner < -1e-9) r.record(-inner, pair_witness(x, y, inner));
    } catch (const SelectionDomainError& e) {
      r.record(0.0, point_witness(y, 0.0) + " unexpected domain error: " + e.what());
    }
  }
  return r;
}

CheckResult check_known_solution_fixed(const ProblemInstance& instance, double beta_lo,
                                       double beta_hi) {
  CheckResult r;
  r.name = "known_solution_fixed_point";
  if (!instance.known_solution) {
    r.witness = "no known solution on the instance";
    return r;
  }
  const Vector& star = *instance.known_solution;
  for (int t = 0; t < 7; ++t) {
    const double beta = beta_lo + (beta_hi - beta_lo) * t / 6.0;
    for (std::size_t i = 0; i < instance.components.size(); ++i) {
      const Vector J = forward_backward_map(instance.components[i].A, instance.components[i].B,
                                            beta, star);
      const double gap = (star - J).norm();
      ++r.samples;
      if (gap > 1e-9) {
        std::ostringstream os;
        os << "component " << i << " beta=" << beta << " ||x*-J(x*)||=" << gap;
        r.record(gap, os.str());
      }
    }
  }
  return r;
}

CheckReport verify_instance(const ProblemInstance& instance, const VerifyConfig& config) {
  CheckReport report;
  const BoxRegion ambient = inflate(instance.X.bounding_box(10.0), 1.0);

  auto add = [&report](CheckResult r, const std::string& prefix) {
    r.name = prefix + "." + r.name;
    report.checks.push_back(std::move(r));
  };

  for (std::size_t i = 0; i < instance.components.size(); ++i) {
    const auto& comp = instance.components[i];
    const std::string tag = "component" + std::to_string(i);
    std::uint64_t s = config.seed + 101 * (i + 1);

    add(check_forward_monotone(comp.A, ambient, config.pairs, s), tag + ".A");
    add(check_resolvent_firm(comp.B, ambient, config.pairs, s + 1, config.beta_lo, config.beta_hi),
        tag + ".B");
    add(check_selection_bound(comp.B, ambient, config.pairs, s + 2, instance.radius_R), tag + ".B");
    add(check_graph_consistency(comp.B, ambient, config.pairs, s + 3, instance.radius_R),
        tag + ".B");
    if (comp.B.kind() == SetValuedOperator::Kind::normal_cone) {
      add(check_resolvent_beta_free(comp.B, ambient, config.betas, s + 4), tag + ".B");
      const ConvexSet& C = comp.B.set();
      const BoxRegion around = inflate(C.bounding_box(10.0), 1.0);
      add(check_projection_contraction(C, around, config.pairs, s + 5), tag + ".B.set");
      add(check_projection_obtuse(C, around, config.pairs, s + 6), tag + ".B.set");
      add(check_projection_idempotent(C, around, config.pairs, s + 7), tag + ".B.set");
    }
  }

  add(check_projection_contraction(instance.X, ambient, config.pairs, config.seed + 11), "X");
  add(check_projection_obtuse(instance.X, ambient, config.pairs, config.seed + 12), "X");
  add(check_projection_idempotent(instance.X, ambient, config.pairs, config.seed + 13), "X");

  if (instance.known_solution)
    add(check_known_solution_fixed(instance, config.beta_lo, config.beta_hi), "instance");

  {
    CheckResult r;
    r.name = "instance.instrumented_solve";
    std::mt19937_64 rng(config.seed + 99);
    Vector x0 = instance.X.project(sample_in(ambient, rng));
    AlgoParams params;
    params.max_outer = config.solve_iterations;
    try {
      SolveResult run = solve(instance, params, x0, {.verify = true});
      r.samples = run.trace.iterations_count();
      if (run.status == SolveStatus::linesearch_failure)
        r.record(0.0, "linesearch failure: " + run.trace.failure_detail);
    } catch (const VerifyError& e) {
      r.record(0.0, e.what());
    }
    report.checks.push_back(std::move(r));
  }

  return report;
}

}  // namespace splitsys
