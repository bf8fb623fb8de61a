#include "splitsys/operators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace splitsys {

Vector affine_eval(const Matrix& M, const Vector& q, const Vector& x) {
  if (M.rows() != M.cols()) throw ConfigError("affine_eval: matrix must be square");
  require_dim(q, M.rows(), "affine_eval offset");
  require_dim(x, M.rows(), "affine_eval argument");
  return M * x + q;
}

Vector resolvent_normal_cone(const ConvexSet& C, double beta, const Vector& x) {
  if (!(beta > 0.0)) throw ConfigError("resolvent_normal_cone: beta must be > 0");
  return C.project(x);  // independent of beta
}

Vector soft_threshold(double lambda, double beta, const Vector& x) {
  if (!(lambda > 0.0) || !(beta > 0.0)) throw ConfigError("soft_threshold: lambda and beta must be > 0");
  const double t = beta * lambda;
  return (x.array().sign() * (x.array().abs() - t).max(0.0)).matrix();
}

Vector selection_normal_cone(const ConvexSet& C, const Vector& x, double radius) {
  if (!(radius > 0.0)) throw ConfigError("selection_normal_cone: radius must be > 0");
  require_dim(x, C.dim(), "selection_normal_cone");
  if (C.distance(x) > 1e-9)
    throw SelectionDomainError("selection_normal_cone: point outside the set (distance " +
                               std::to_string(C.distance(x)) + ")");
  return Vector::Zero(C.dim());  // 0 lies in every normal cone at a member
}

Vector selection_l1(double lambda, const Vector& x, double radius) {
  if (!(lambda > 0.0)) throw ConfigError("selection_l1: lambda must be > 0");
  const double needed = lambda * std::sqrt(static_cast<double>(x.size()));
  if (radius < needed)
    throw ConfigError("selection_l1: radius " + std::to_string(radius) +
                      " below the selection bound lambda*sqrt(n) = " + std::to_string(needed));
  return (lambda * x.array().sign()).matrix();
}

// --- ForwardOperator -------------------------------------------------------

namespace {

void check_psd_symmetric_part(const Matrix& M) {
  Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10)
    throw ConfigError("affine operator: symmetric part has negative eigenvalue " +
                      std::to_string(min_eig) + "; map is not monotone");
}

}  // namespace

ForwardOperator ForwardOperator::affine(Matrix M, Vector q) {
  if (M.rows() != M.cols() || M.rows() < 1) throw ConfigError("affine operator: matrix must be square");
  require_dim(q, M.rows(), "affine operator offset");
  check_psd_symmetric_part(M);
  ForwardOperator op(Kind::affine, M.rows());
  op.M_ = std::move(M);
  op.q_ = std::move(q);
  op.label_ = "affine";
  return op;
}

ForwardOperator ForwardOperator::affine_unchecked(Matrix M, Vector q) {
  if (M.rows() != M.cols() || M.rows() < 1) throw ConfigError("affine operator: matrix must be square");
  require_dim(q, M.rows(), "affine operator offset");
  ForwardOperator op(Kind::affine, M.rows());
  op.M_ = std::move(M);
  op.q_ = std::move(q);
  op.label_ = "affine";
  return op;
}

ForwardOperator ForwardOperator::zero(Index dim) {
  if (dim < 1) throw ConfigError("zero operator: dimension must be >= 1");
  ForwardOperator op(Kind::zero, dim);
  op.label_ = "zero";
  return op;
}

ForwardOperator ForwardOperator::custom(Index dim, std::function<Vector(const Vector&)> eval,
                                        std::string label) {
  if (dim < 1) throw ConfigError("custom operator: dimension must be >= 1");
  ForwardOperator op(Kind::custom, dim);
  op.fn_ = std::move(eval);
  op.label_ = std::move(label);
  return op;
}

Vector ForwardOperator::operator()(const Vector& x) const {
  require_dim(x, dim_, "ForwardOperator::eval");
  switch (kind_) {
    case Kind::affine:
      return M_ * x + q_;
    case Kind::zero:
      return Vector::Zero(dim_);
    case Kind::custom:
      return fn_(x);
  }
  throw ConfigError("ForwardOperator: unknown kind");
}

const Matrix& ForwardOperator::matrix() const {
  if (kind_ != Kind::affine) throw ConfigError("ForwardOperator::matrix: not an affine operator");
  return M_;
}

const Vector& ForwardOperator::shift() const {
  if (kind_ != Kind::affine) throw ConfigError("ForwardOperator::shift: not an affine operator");
  return q_;
}

// --- SetValuedOperator -----------------------------------------------------

SetValuedOperator SetValuedOperator::normal_cone(ConvexSet set) {
  SetValuedOperator op(Kind::normal_cone, set.dim());
  op.set_ = std::move(set);
  op.label_ = "normal_cone";
  return op;
}

SetValuedOperator SetValuedOperator::l1(double lambda, Index dim) {
  if (!(lambda > 0.0)) throw ConfigError("l1 operator: lambda must be > 0");
  if (dim < 1) throw ConfigError("l1 operator: dimension must be >= 1");
  SetValuedOperator op(Kind::l1, dim);
  op.lambda_ = lambda;
  op.label_ = "l1";
  return op;
}

SetValuedOperator SetValuedOperator::zero(Index dim) {
  if (dim < 1) throw ConfigError("zero operator: dimension must be >= 1");
  SetValuedOperator op(Kind::zero, dim);
  op.label_ = "zero";
  return op;
}

SetValuedOperator SetValuedOperator::custom(Index dim,
                                            std::function<Vector(double, const Vector&)> resolvent,
                                            std::function<Vector(const Vector&, double)> selection,
                                            std::string label) {
  if (dim < 1) throw ConfigError("custom operator: dimension must be >= 1");
  SetValuedOperator op(Kind::custom, dim);
  op.res_fn_ = std::move(resolvent);
  op.sel_fn_ = std::move(selection);
  op.label_ = std::move(label);
  return op;
}

Vector SetValuedOperator::resolvent(double beta, const Vector& x) const {
  if (!(beta > 0.0)) throw ConfigError("SetValuedOperator::resolvent: beta must be > 0");
  require_dim(x, dim_, "SetValuedOperator::resolvent");
  switch (kind_) {
    case Kind::normal_cone:
      return set_->project(x);
    case Kind::l1:
      return soft_threshold(lambda_, beta, x);
    case Kind::zero:
      return x;
    case Kind::custom:
      return res_fn_(beta, x);
  }
  throw ConfigError("SetValuedOperator: unknown kind");
}

Vector SetValuedOperator::selection(const Vector& x, double radius) const {
  require_dim(x, dim_, "SetValuedOperator::selection");
  switch (kind_) {
    case Kind::normal_cone:
      return selection_normal_cone(*set_, x, radius);
    case Kind::l1:
      return selection_l1(lambda_, x, radius);
    case Kind::zero:
      if (!(radius > 0.0)) throw ConfigError("selection: radius must be > 0");
      return Vector::Zero(dim_);
    case Kind::custom:
      return sel_fn_(x, radius);
  }
  throw ConfigError("SetValuedOperator: unknown kind");
}

const ConvexSet& SetValuedOperator::set() const {
  if (!set_) throw ConfigError("SetValuedOperator::set: not a normal cone");
  return *set_;
}

double SetValuedOperator::lambda() const {
  if (kind_ != Kind::l1) throw ConfigError("SetValuedOperator::lambda: not an l1 operator");
  return lambda_;
}

bool SetValuedOperator::domain_contains(const Vector& x, double tol) const {
  if (kind_ == Kind::normal_cone) return set_->distance(x) <= tol;
  return true;  // l1, zero and custom operators are taken to be total
}

Vector forward_backward_map(const ForwardOperator& A, const SetValuedOperator& B, double beta,
                            const Vector& z) {
  if (A.dim() != B.dim()) throw ConfigError("forward_backward_map: operator dimensions disagree");
  if (!(beta > 0.0)) throw ConfigError("forward_backward_map: beta must be > 0");
  return B.resolvent(beta, z - beta * A(z));
}

const char* to_string(ForwardOperator::Kind k) {
  switch (k) {
    case ForwardOperator::Kind::affine: return "affine";
    case ForwardOperator::Kind::zero: return "zero";
    case ForwardOperator::Kind::custom: return "custom";
  }
  return "unknown";
}

const char* to_string(SetValuedOperator::Kind k) {
  switch (k) {
    case SetValuedOperator::Kind::normal_cone: return "normal_cone";
    case SetValuedOperator::Kind::l1: return "l1";
    case SetValuedOperator::Kind::zero: return "zero";
    case SetValuedOperator::Kind::custom: return "custom";
  }
  return "unknown";
}

}  // namespace splitsys
