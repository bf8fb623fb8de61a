#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace splitsys {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Invalid construction arguments, parameter ranges, dimension mismatches.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A selection oracle was queried outside the operator's domain.
class SelectionDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The backtracking loop exhausted its step budget.
class LinesearchError : public std::runtime_error {
 public:
  LinesearchError(const std::string& msg, int tried) : std::runtime_error(msg), steps_tried(tried) {}
  int steps_tried;
};

/// The independent reference solver failed to reach its target accuracy.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A runtime invariant assertion failed while running in verify mode.
class VerifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File read/write or parse failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_finite(const Vector& v) { return v.allFinite(); }

inline void require_dim(const Vector& v, Index n, const char* what) {
  if (v.size() != n)
    throw ConfigError(std::string(what) + ": expected dimension " + std::to_string(n) + ", got " +
                      std::to_string(v.size()));
}

/// Axis-aligned box used as a sampling region for randomized checks.
struct BoxRegion {
  Vector lo;
  Vector hi;
  Index dim() const { return lo.size(); }
};

}  // namespace splitsys
