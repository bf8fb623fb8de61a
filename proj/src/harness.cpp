#include "splitsys/harness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "splitsys/operators.hpp"

namespace splitsys {

const char* to_string(Structure s) {
  switch (s) {
    case Structure::affine_vi:
      return "affine_vi";
    case Structure::mixed_l1:
      return "mixed_l1";
  }
  return "?";
}

Structure structure_from_string(const std::string& name) {
  if (name == "affine_vi") return Structure::affine_vi;
  if (name == "mixed_l1") return Structure::mixed_l1;
  throw ConfigError("unknown structure '" + name + "' (expected affine_vi or mixed_l1)");
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vector gaussian_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vector v(n);
  for (Index j = 0; j < n; ++j) v[j] = d(rng);
  return v;
}

Vector unit_direction(Index n, std::mt19937_64& rng) {
  Vector v = gaussian_vector(n, rng);
  const double norm = v.norm();
  if (norm < 1e-12) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / norm;
}

// Orthonormal basis whose first column is the given unit vector.
Matrix orthonormal_from(const Vector& first, std::mt19937_64& rng) {
  const Index n = first.size();
  Matrix seed(n, n);
  seed.col(0) = first;
  for (Index j = 1; j < n; ++j) seed.col(j) = gaussian_vector(n, rng);
  Matrix Q = Eigen::HouseholderQR<Matrix>(seed).householderQ();
  if (Q.col(0).dot(first) < 0.0) Q = -Q;
  return Q;
}

Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  return orthonormal_from(unit_direction(n, rng), rng);
}

// Symmetric part U diag(d) U^T with d[0] = lam_slow on the shared direction
// and the rest in [0.3, 0.85], plus a mild rotation confined to the
// complement of that direction so the slow mode stays put.
Matrix component_matrix(const Vector& v_slow, double lam_slow, std::mt19937_64& rng) {
  const Index n = v_slow.size();
  const Matrix U = orthonormal_from(v_slow, rng);
  Vector d(n);
  d[0] = lam_slow;
  for (Index j = 1; j < n; ++j) d[j] = uniform(rng, 0.3, 0.85);
  Matrix M = U * d.asDiagonal() * U.transpose();
  if (n >= 3) {
    Matrix T(n - 1, n - 1);
    for (Index r = 0; r < n - 1; ++r) T.row(r) = gaussian_vector(n - 1, rng).transpose();
    Matrix S = 0.5 * (T - T.transpose());
    const double top = Eigen::JacobiSVD<Matrix>(S).singularValues()(0);
    if (top > 1e-12) {
      const Matrix W = U.rightCols(n - 1);
      M += W * ((0.2 / top) * S) * W.transpose();
    }
  }
  return M;
}

ConvexSet planted_box(const Vector& star, std::mt19937_64& rng) {
  const Index n = star.size();
  Vector lo(n), hi(n);
  for (Index j = 0; j < n; ++j) {
    lo[j] = star[j] - uniform(rng, 0.5, 1.5);
    hi[j] = star[j] + uniform(rng, 0.5, 1.5);
  }
  return ConvexSet::box(lo, hi);
}

ConvexSet planted_ball(const Vector& star, std::mt19937_64& rng) {
  const Index n = star.size();
  const Vector off = uniform(rng, 0.0, 0.3) * unit_direction(n, rng);
  const double radius = off.norm() + uniform(rng, 0.5, 1.0) * std::sqrt(double(n));
  return ConvexSet::ball(star + off, radius);
}

// Largest h such that the cube [star-h, star+h] fits inside the set.
double halfwidth_inside(const ConvexSet& C, const Vector& star) {
  const Index n = star.size();
  if (C.kind() == ConvexSet::Kind::box)
    return std::min((star - C.lo()).minCoeff(), (C.hi() - star).minCoeff());
  if (C.kind() == ConvexSet::Kind::ball) {
    const Vector d = (star - C.center()).cwiseAbs();
    const double s1 = d.sum();
    const double s2 = d.squaredNorm();
    const double r2 = C.radius() * C.radius();
    const double disc = s1 * s1 + n * (r2 - s2);
    if (disc <= 0.0) return 0.0;
    return (-s1 + std::sqrt(disc)) / n;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

ProblemInstance generate_planted_system(const GeneratorConfig& cfg) {
  if (cfg.n < 1) throw ConfigError("generator: n must be >= 1");
  if (cfg.m < 1) throw ConfigError("generator: m must be >= 1");
  const Index n = cfg.n;
  const bool mixed = cfg.structure == Structure::mixed_l1;
  std::mt19937_64 rng(cfg.seed ^ (mixed ? 0x9e3779b97f4a7c15ull : 0ull));

  Vector star(n);
  if (mixed) {
    // keep every coordinate clear of the l1 kink
    for (Index j = 0; j < n; ++j)
      star[j] = (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0) * uniform(rng, 0.2, 1.0);
  } else {
    for (Index j = 0; j < n; ++j) star[j] = uniform(rng, -1.0, 1.0);
  }
  const Vector v_slow = unit_direction(n, rng);

  ProblemInstance inst;
  inst.n = n;
  inst.seed = cfg.seed;
  {
    std::ostringstream os;
    os << to_string(cfg.structure) << "_n" << n << "_m" << cfg.m << "_s" << cfg.seed;
    inst.name = os.str();
  }
  inst.known_solution = star;

  double radius = 10.0;
  double h = std::numeric_limits<double>::infinity();
  int cone_count = 0;
  for (Index i = 0; i < cfg.m; ++i) {
    // one component dominates the shared slow direction; the rest barely
    // touch it, so the residual tracks the displacement near the solution
    const double lam_slow = (i == 0) ? 0.1 : 0.01;
    if (mixed && i == 0) {
      const double lambda = uniform(rng, 0.3, 1.0);
      const Matrix U = orthonormal_from(v_slow, rng);
      Vector d(n);
      d[0] = lam_slow;
      for (Index j = 1; j < n; ++j) d[j] = uniform(rng, 0.3, 0.85);
      const Matrix O = random_orthogonal(n, rng);
      const Matrix W = O * d.cwiseSqrt().asDiagonal() * U.transpose();
      const Vector g = lambda * star.array().sign().matrix();
      const Vector b = W * star + O * d.cwiseSqrt().cwiseInverse().asDiagonal() * (U.transpose() * g);
      inst.components.push_back(
          {ForwardOperator::affine(W.transpose() * W, -(W.transpose() * b)),
           SetValuedOperator::l1(lambda, n)});
      radius = std::max(radius, lambda * std::sqrt(double(n)) + 1.0);
    } else {
      const Matrix M = component_matrix(v_slow, lam_slow, rng);
      const ConvexSet C =
          (cone_count++ % 2 == 0) ? planted_box(star, rng) : planted_ball(star, rng);
      h = std::min(h, halfwidth_inside(C, star));
      inst.components.push_back(
          {ForwardOperator::affine(M, -(M * star)), SetValuedOperator::normal_cone(C)});
    }
  }

  if (!std::isfinite(h)) h = 1.5;
  h = std::min(0.9 * h, 2.0);
  const Vector ones = Vector::Ones(n);
  inst.X = ConvexSet::box(star - h * ones, star + h * ones);
  inst.radius_R = radius;

  const auto validation = inst.validate();
  if (!validation.warnings.empty())
    throw ConfigError("generator produced an inconsistent instance: " + validation.warnings.front());
  return inst;
}

ProblemInstance generate_planted_system(Index n, Index m, std::uint64_t seed, Structure structure) {
  return generate_planted_system(GeneratorConfig{n, m, seed, structure});
}

namespace {

// Scan the lattice box at the given spacing for the smallest system residual.
Vector lattice_min(const ProblemInstance& inst, const BoxRegion& box, double res) {
  const double beta = 0.55;
  Vector best;
  double best_val = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& x) {
    const double val = residual(inst, beta, x);
    if (val < best_val) {
      best_val = val;
      best = x;
    }
  };
  if (inst.n == 1) {
    const long steps = static_cast<long>(std::ceil((box.hi[0] - box.lo[0]) / res));
    Vector x(1);
    for (long a = 0; a <= steps; ++a) {
      x[0] = std::min(box.lo[0] + a * res, box.hi[0]);
      consider(x);
    }
  } else if (inst.n == 2) {
    const long steps0 = static_cast<long>(std::ceil((box.hi[0] - box.lo[0]) / res));
    const long steps1 = static_cast<long>(std::ceil((box.hi[1] - box.lo[1]) / res));
    Vector x(2);
    for (long a = 0; a <= steps0; ++a) {
      x[0] = std::min(box.lo[0] + a * res, box.hi[0]);
      for (long b = 0; b <= steps1; ++b) {
        x[1] = std::min(box.lo[1] + b * res, box.hi[1]);
        consider(x);
      }
    }
  } else {
    throw ConfigError("grid search supports dimensions 1 and 2 only");
  }
  return best;
}

}  // namespace

Vector grid_search_solve(const ProblemInstance& instance, double resolution) {
  if (!(resolution > 0.0)) throw ConfigError("grid search: resolution must be positive");
  return lattice_min(instance, instance.X.bounding_box(10.0), resolution);
}

Vector oracle_solve(const ProblemInstance& instance, long rounds, double step0) {
  if (rounds < 1) throw ConfigError("oracle: rounds must be >= 1");
  if (!(step0 > 0.0)) throw ConfigError("oracle: step0 must be positive");
  const double check_beta = 0.55;

  Vector x = instance.X.project(Vector::Zero(instance.n));
  for (long t = 1; t <= rounds; ++t) {
    const double beta = step0 / std::sqrt(static_cast<double>(t));
    for (const Component& c : instance.components) x = c.B.resolvent(beta, x - beta * c.A(x));
    if (t % 250 == 0 && residual(instance, check_beta, x) <= 1e-7) break;
  }

  const double final_res = residual(instance, check_beta, x);
  if (final_res > 1e-4) {
    std::ostringstream os;
    os << "oracle stalled at residual " << final_res << " after " << rounds << " rounds";
    throw OracleError(os.str());
  }

  if (instance.n <= 2) {
    const BoxRegion box = instance.X.bounding_box(10.0);
    const double span = (box.hi - box.lo).maxCoeff();
    const double coarse = std::max(span / 1000.0, 1e-9);
    Vector g = lattice_min(instance, box, coarse);
    const Vector pad = Vector::Constant(instance.n, 2.0 * coarse);
    g = lattice_min(instance, BoxRegion{g - pad, g + pad}, coarse / 50.0);
    if ((g - x).norm() > 5e-3) {
      std::ostringstream os;
      os << "oracle iterate disagrees with the grid minimizer by " << (g - x).norm();
      throw OracleError(os.str());
    }
  }
  return x;
}

Vector default_start(const ProblemInstance& instance, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const BoxRegion box = instance.X.bounding_box(10.0);
  Vector x(instance.n);
  for (Index j = 0; j < instance.n; ++j) x[j] = uniform(rng, box.lo[j], box.hi[j]);
  return instance.X.project(x);
}

Metrics evaluate_run(const SolveTrace& trace, const ProblemInstance& instance) {
  if (trace.iterations.empty()) throw ConfigError("evaluate_run: empty trace");
  Metrics m;
  m.status = trace.status;
  m.stop_reason = trace.stop_reason;
  m.iterations = trace.iterations_count();
  m.final_residual = trace.final_residual();
  m.chain_violations = trace.fejer_chain_violations;
  m.containment_violations = trace.containment_violations;
  m.accepted_step_violations = trace.accepted_step_violations;
  m.max_linesearch_j = trace.max_linesearch_j;
  m.x0_projected = trace.x0_projected;
  for (const IterationRecord& rec : trace.iterations) {
    m.total_linesearch_steps += rec.linesearch_total();
    m.wall_time_ms += rec.time_ms;
  }
  if (instance.known_solution) {
    const Vector& star = *instance.known_solution;
    m.dist_to_solution.reserve(trace.iterations.size());
    for (const IterationRecord& rec : trace.iterations)
      m.dist_to_solution.push_back((rec.x - star).norm());
    for (std::size_t k = 1; k < m.dist_to_solution.size(); ++k)
      if (m.dist_to_solution[k] > m.dist_to_solution[k - 1] + 1e-10) ++m.fejer_violations;
  }
  return m;
}

std::vector<GeneratorConfig> acceptance_suite() {
  static const Index dims[] = {2, 10, 50};
  static const Index comps[] = {1, 2, 5};
  std::vector<GeneratorConfig> suite;
  suite.reserve(20);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    GeneratorConfig cfg;
    cfg.n = dims[(s - 1) % 3];
    cfg.m = comps[((s - 1) / 3) % 3];
    cfg.seed = s;
    cfg.structure = (s % 2 == 1) ? Structure::affine_vi : Structure::mixed_l1;
    suite.push_back(cfg);
  }
  return suite;
}

}  // namespace splitsys
