#pragma once

#include <utility>

#include "splitsys/types.hpp"

namespace splitsys {

/// Separating halfspace {y : <normal, y - anchor> <= 0}.
struct Halfspace {
  Vector normal;
  Vector anchor;

  bool contains(const Vector& y, double tol = 1e-12) const;
};

/// Projection onto a halfspace. Points already inside are returned unchanged;
/// a normal of norm <= 1e-14 degenerates to the whole space (identity).
Vector project_halfspace(const Halfspace& h, const Vector& z);

/// Closed convex set with an exact projection oracle.
class ConvexSet {
 public:
  enum class Kind { whole_space, box, ball, halfspace, hyperplane };

  static ConvexSet whole_space(Index dim);
  static ConvexSet box(Vector lo, Vector hi);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet halfspace(Vector normal, Vector anchor);
  static ConvexSet hyperplane(Vector normal, double offset);

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }

  /// Nearest point of the set; idempotent.
  Vector project(const Vector& x) const;

  /// Distance to the set, ||x - project(x)||.
  double distance(const Vector& x) const;

  /// Membership via projection distance.
  bool contains(const Vector& x, double tol = 1e-10) const { return distance(x) <= tol; }

  /// Axis-aligned bounds enclosing the set, for sampling. Unbounded kinds
  /// fall back to a centered cube of the given half-width.
  BoxRegion bounding_box(double fallback_halfwidth = 10.0) const;

  // Descriptor accessors; only valid for the matching kind.
  const Vector& lo() const { return a_; }
  const Vector& hi() const { return b_; }
  const Vector& center() const { return a_; }
  double radius() const { return r_; }
  const Vector& normal() const { return a_; }
  const Vector& anchor() const { return b_; }
  double offset() const { return r_; }

 private:
  ConvexSet(Kind k, Index dim) : kind_(k), dim_(dim) {}
  Kind kind_;
  Index dim_;
  Vector a_, b_;
  double r_ = 0.0;
};

/// Projection onto a catalog set.
inline Vector project(const ConvexSet& set, const Vector& x) { return set.project(x); }

const char* to_string(ConvexSet::Kind k);

}  // namespace splitsys
