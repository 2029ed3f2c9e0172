#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace dfm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when inputs violate a model or algorithm precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a distribution parameter falls outside its domain for some
/// entry of the population matrix.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed text inputs (GML, config, CSV, matrices).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative numerical routine does not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// True when max|m - m'| <= rel_tol * max(1, max|m|).
inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, max_abs(m));
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = j + 1; i < m.rows(); ++i) {
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale) return false;
    }
  }
  return true;
}

/// Singular values in descending order.
inline Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector{};
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

inline int numerical_rank(const Vector& sorted_singular_values,
                          double rel_tol = kRankTolerance) {
  if (sorted_singular_values.size() == 0) return 0;
  const double top = sorted_singular_values(0);
  if (top <= 0.0) return 0;
  int rank = 0;
  for (Index i = 0; i < sorted_singular_values.size(); ++i) {
    if (sorted_singular_values(i) >= rel_tol * top) ++rank;
  }
  return rank;
}

inline int numerical_rank(const Matrix& m, double rel_tol = kRankTolerance) {
  return numerical_rank(singular_values(m), rel_tol);
}

}  // namespace dfm
