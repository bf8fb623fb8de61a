#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "splitsys/geometry.hpp"
#include "splitsys/types.hpp"

namespace splitsys {

/// Mx + q.
Vector affine_eval(const Matrix& M, const Vector& q, const Vector& x);

/// Resolvent of a normal cone: the projection onto the set, for every beta > 0.
Vector resolvent_normal_cone(const ConvexSet& C, double beta, const Vector& x);

/// Componentwise shrink sign(x_j) * max(|x_j| - beta*lambda, 0), the resolvent
/// of the scaled l1 subdifferential.
Vector soft_threshold(double lambda, double beta, const Vector& x);

/// Zero vector; valid for members of C, throws SelectionDomainError otherwise.
Vector selection_normal_cone(const ConvexSet& C, const Vector& x, double radius);

/// Minimal-norm subgradient of lambda*||.||_1: lambda*sign on the support,
/// zero at kinks. Requires radius >= lambda*sqrt(n).
Vector selection_l1(double lambda, const Vector& x, double radius);

/// Point-to-point monotone map with an evaluation oracle.
///
/// Catalog entries carry a structural descriptor so they can be serialized
/// and structurally validated; custom entries wrap an arbitrary callable and
/// exist for tests and experiments only.
class ForwardOperator {
 public:
  enum class Kind { affine, zero, custom };

  /// Affine map Mx + q. The symmetric part of M must be positive
  /// semidefinite (eigenvalue check with slack 1e-10).
  static ForwardOperator affine(Matrix M, Vector q);

  /// Affine map without the monotonicity check at construction.
  static ForwardOperator affine_unchecked(Matrix M, Vector q);

  static ForwardOperator zero(Index dim);

  static ForwardOperator custom(Index dim, std::function<Vector(const Vector&)> eval,
                                std::string label = "custom");

  Vector operator()(const Vector& x) const;
  Vector eval(const Vector& x) const { return (*this)(x); }

  Index dim() const { return dim_; }
  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  const Matrix& matrix() const;
  const Vector& shift() const;

  /// Region on which randomized sampling checks exercise this operator.
  std::optional<BoxRegion> working_box;

 private:
  ForwardOperator(Kind k, Index dim) : kind_(k), dim_(dim) {}
  Kind kind_;
  Index dim_;
  Matrix M_;
  Vector q_;
  std::function<Vector(const Vector&)> fn_;
  std::string label_;
};

/// Maximal monotone point-to-set operator exposed through two oracles: the
/// resolvent (I + beta B)^{-1} and a bounded selection from B(x).
class SetValuedOperator {
 public:
  enum class Kind { normal_cone, l1, zero, custom };

  static SetValuedOperator normal_cone(ConvexSet set);
  static SetValuedOperator l1(double lambda, Index dim);
  static SetValuedOperator zero(Index dim);
  static SetValuedOperator custom(Index dim,
                                  std::function<Vector(double, const Vector&)> resolvent,
                                  std::function<Vector(const Vector&, double)> selection,
                                  std::string label = "custom");

  /// (I + beta B)^{-1}(x); single valued, firmly nonexpansive.
  Vector resolvent(double beta, const Vector& x) const;

  /// Some u in B(x) with ||u|| <= radius. Throws SelectionDomainError when x
  /// lies outside dom(B), ConfigError when radius is structurally too small.
  Vector selection(const Vector& x, double radius) const;

  Index dim() const { return dim_; }
  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  const ConvexSet& set() const;
  double lambda() const;

  /// dom(B) when it is a proper subset of the space (normal cones).
  bool domain_contains(const Vector& x, double tol = 1e-9) const;

  std::optional<BoxRegion> working_box;

 private:
  SetValuedOperator(Kind k, Index dim) : kind_(k), dim_(dim) {}
  Kind kind_;
  Index dim_;
  std::optional<ConvexSet> set_;
  double lambda_ = 0.0;
  std::function<Vector(double, const Vector&)> res_fn_;
  std::function<Vector(const Vector&, double)> sel_fn_;
  std::string label_;
};

/// One forward-backward step (I + beta B)^{-1}(I - beta A) applied to z.
/// Its fixed points are exactly the zeros of A + B.
Vector forward_backward_map(const ForwardOperator& A, const SetValuedOperator& B, double beta,
                            const Vector& z);

const char* to_string(ForwardOperator::Kind k);
const char* to_string(SetValuedOperator::Kind k);

}  // namespace splitsys
