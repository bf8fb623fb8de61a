#include "splitsys/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace splitsys {

bool Halfspace::contains(const Vector& y, double tol) const {
  require_dim(y, normal.size(), "Halfspace::contains");
  return normal.dot(y - anchor) <= tol;
}

Vector project_halfspace(const Halfspace& h, const Vector& z) {
  require_dim(z, h.normal.size(), "project_halfspace");
  const double wn2 = h.normal.squaredNorm();
  if (std::sqrt(wn2) <= 1e-14) return z;  // degenerate: the whole space
  const double slack = h.normal.dot(z - h.anchor);
  if (slack <= 0.0) return z;
  return z - (slack / wn2) * h.normal;
}

ConvexSet ConvexSet::whole_space(Index dim) {
  if (dim < 1) throw ConfigError("whole_space: dimension must be >= 1");
  return ConvexSet(Kind::whole_space, dim);
}

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  if (lo.size() < 1 || lo.size() != hi.size()) throw ConfigError("box: lo/hi dimension mismatch");
  if (!is_finite(lo) || !is_finite(hi)) throw ConfigError("box: bounds must be finite");
  if (((hi - lo).array() < 0.0).any()) throw ConfigError("box: requires lo <= hi componentwise");
  ConvexSet s(Kind::box, lo.size());
  s.a_ = std::move(lo);
  s.b_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (center.size() < 1) throw ConfigError("ball: dimension must be >= 1");
  if (!is_finite(center) || !(radius >= 0.0)) throw ConfigError("ball: requires finite center and radius >= 0");
  ConvexSet s(Kind::ball, center.size());
  s.a_ = std::move(center);
  s.r_ = radius;
  return s;
}

ConvexSet ConvexSet::halfspace(Vector normal, Vector anchor) {
  if (normal.size() < 1 || normal.size() != anchor.size())
    throw ConfigError("halfspace: normal/anchor dimension mismatch");
  if (!is_finite(normal) || !is_finite(anchor)) throw ConfigError("halfspace: data must be finite");
  ConvexSet s(Kind::halfspace, normal.size());
  s.a_ = std::move(normal);
  s.b_ = std::move(anchor);
  return s;
}

ConvexSet ConvexSet::hyperplane(Vector normal, double offset) {
  if (normal.size() < 1) throw ConfigError("hyperplane: dimension must be >= 1");
  if (normal.norm() <= 1e-14) throw ConfigError("hyperplane: normal must be nonzero");
  ConvexSet s(Kind::hyperplane, normal.size());
  s.a_ = std::move(normal);
  s.r_ = offset;
  return s;
}

Vector ConvexSet::project(const Vector& x) const {
  require_dim(x, dim_, "ConvexSet::project");
  switch (kind_) {
    case Kind::whole_space:
      return x;
    case Kind::box:
      return x.cwiseMax(a_).cwiseMin(b_);
    case Kind::ball: {
      Vector d = x - a_;
      const double nrm = d.norm();
      if (nrm <= r_) return x;
      return a_ + (r_ / nrm) * d;
    }
    case Kind::halfspace:
      return project_halfspace(Halfspace{a_, b_}, x);
    case Kind::hyperplane: {
      const double shift = (a_.dot(x) - r_) / a_.squaredNorm();
      return x - shift * a_;
    }
  }
  throw ConfigError("ConvexSet::project: unknown kind");
}

double ConvexSet::distance(const Vector& x) const { return (x - project(x)).norm(); }

BoxRegion ConvexSet::bounding_box(double fallback_halfwidth) const {
  BoxRegion r;
  switch (kind_) {
    case Kind::box:
      r.lo = a_;
      r.hi = b_;
      return r;
    case Kind::ball:
      r.lo = (a_.array() - r_).matrix();
      r.hi = (a_.array() + r_).matrix();
      return r;
    case Kind::halfspace:
      r.lo = (b_.array() - fallback_halfwidth).matrix();
      r.hi = (b_.array() + fallback_halfwidth).matrix();
      return r;
    case Kind::whole_space:
    case Kind::hyperplane:
      r.lo = Vector::Constant(dim_, -fallback_halfwidth);
      r.hi = Vector::Constant(dim_, fallback_halfwidth);
      return r;
  }
  throw ConfigError("ConvexSet::bounding_box: unknown kind");
}

const char* to_string(ConvexSet::Kind k) {
  switch (k) {
    case ConvexSet::Kind::whole_space: return "whole_space";
    case ConvexSet::Kind::box: return "box";
    case ConvexSet::Kind::ball: return "ball";
    case ConvexSet::Kind::halfspace: return "halfspace";
    case ConvexSet::Kind::hyperplane: return "affine_hyperplane";
  }
  return "unknown";
}

}  // namespace splitsys
