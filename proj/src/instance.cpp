#include "splitsys/instance.hpp"

#include <cmath>
#include <random>

namespace splitsys {

double residual(const ProblemInstance& instance, double beta, const Vector& x) {
  require_dim(x, instance.n, "residual");
  double worst = 0.0;
  for (const auto& comp : instance.components) {
    const double r = (x - forward_backward_map(comp.A, comp.B, beta, x)).norm();
    worst = std::max(worst, r);
  }
  return worst;
}

namespace {

bool box_in_box(const ConvexSet& outer, const ConvexSet& inner) {
  return (inner.lo().array() >= outer.lo().array() - 1e-12).all() &&
         (inner.hi().array() <= outer.hi().array() + 1e-12).all();
}

bool box_in_ball(const ConvexSet& ball, const ConvexSet& box) {
  // farthest box corner from the center, coordinatewise
  double d2 = 0.0;
  for (Index j = 0; j < box.dim(); ++j) {
    const double c = ball.center()[j];
    const double d = std::max(std::abs(box.lo()[j] - c), std::abs(box.hi()[j] - c));
    d2 += d * d;
  }
  return std::sqrt(d2) <= ball.radius() + 1e-12;
}

bool ball_in_box(const ConvexSet& box, const ConvexSet& ball) {
  return ((ball.center().array() - ball.radius()) >= box.lo().array() - 1e-12).all() &&
         ((ball.center().array() + ball.radius()) <= box.hi().array() + 1e-12).all();
}

bool ball_in_ball(const ConvexSet& outer, const ConvexSet& inner) {
  return (inner.center() - outer.center()).norm() + inner.radius() <= outer.radius() + 1e-12;
}

}  // namespace

bool set_contains_set(const ConvexSet& outer, const ConvexSet& inner, double tol) {
  using K = ConvexSet::Kind;
  if (outer.kind() == K::whole_space) return true;
  if (inner.kind() == K::box && outer.kind() == K::box) return box_in_box(outer, inner);
  if (inner.kind() == K::box && outer.kind() == K::ball) return box_in_ball(outer, inner);
  if (inner.kind() == K::ball && outer.kind() == K::box) return ball_in_box(outer, inner);
  if (inner.kind() == K::ball && outer.kind() == K::ball) return ball_in_ball(outer, inner);
  // no closed form: sample points of the inner set and test membership
  std::mt19937_64 rng(0x5e7c0u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const BoxRegion bb = inner.bounding_box();
  for (int s = 0; s < 256; ++s) {
    Vector x(inner.dim());
    for (Index j = 0; j < inner.dim(); ++j) x[j] = bb.lo[j] + unit(rng) * (bb.hi[j] - bb.lo[j]);
    x = inner.project(x);
    if (outer.distance(x) > tol) return false;
  }
  return true;
}

ProblemInstance::Validation ProblemInstance::validate(double beta_mid) const {
  Validation out;
  if (n < 1) throw ConfigError("instance: dimension must be >= 1");
  if (components.empty()) throw ConfigError("instance: needs at least one component (m >= 1)");
  if (!(radius_R > 0.0)) throw ConfigError("instance: selection radius must be > 0");
  if (X.dim() != n) throw ConfigError("instance: X dimension disagrees with n");
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    if (c.A.dim() != n || c.B.dim() != n)
      throw ConfigError("instance: component " + std::to_string(i) + " dimension disagrees with n");
    if (c.B.kind() == SetValuedOperator::Kind::l1) {
      const double needed = c.B.lambda() * std::sqrt(static_cast<double>(n));
      if (radius_R < needed)
        throw ConfigError("instance: radius " + std::to_string(radius_R) +
                          " below the l1 selection bound " + std::to_string(needed));
    }
  }
  if (known_solution) {
    require_dim(*known_solution, n, "instance known_solution");
    const double r = residual(*this, beta_mid, *known_solution);
    if (r > 1e-8)
      throw ConfigError("instance: residual at the claimed solution is " + std::to_string(r));
    if (X.distance(*known_solution) > 1e-9)
      out.warnings.push_back("known solution lies outside X");
  }
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& B = components[i].B;
    if (B.kind() == SetValuedOperator::Kind::normal_cone && !set_contains_set(B.set(), X))
      out.warnings.push_back("X is not contained in the domain of component " + std::to_string(i) +
                             "; linesearch probes may leave dom(B)");
  }
  return out;
}

}  // namespace splitsys
