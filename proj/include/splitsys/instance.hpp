#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "splitsys/operators.hpp"

namespace splitsys {

/// One inclusion 0 in A(x) + B(x) of the system.
struct Component {
  ForwardOperator A;
  SetValuedOperator B;
};

/// A system of m inclusion problems over a common constraining set X,
/// optionally with a planted solution for verification.
struct ProblemInstance {
  Index n = 0;
  std::vector<Component> components;
  ConvexSet X = ConvexSet::whole_space(1);
  std::optional<Vector> known_solution;
  double radius_R = 10.0;  // selection bound, shared by all components
  std::string name;
  std::uint64_t seed = 0;

  Index m() const { return static_cast<Index>(components.size()); }

  struct Validation {
    std::vector<std::string> warnings;
  };

  /// Hard violations (dimensions, empty system, bad radius, residual at a
  /// claimed solution) throw ConfigError; detectable soft issues such as
  /// X not contained in a normal-cone domain come back as warnings.
  Validation validate(double beta_mid = 0.55) const;
};

/// max over components of ||x - (I + beta B_i)^{-1}(I - beta A_i)(x)||.
/// Zero exactly at solutions of the system, for every beta > 0.
double residual(const ProblemInstance& instance, double beta, const Vector& x);

/// True when X provably sits inside the set (analytic for box/ball pairs,
/// randomized vertex sampling otherwise). Used for domain containment checks.
bool set_contains_set(const ConvexSet& outer, const ConvexSet& inner, double tol = 1e-9);

}  // namespace splitsys
