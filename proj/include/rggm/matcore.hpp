#pragma once

#include <Eigen/Dense>

#include "rggm/errors.hpp"

namespace rggm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense symmetric matrix. Every mutation writes both triangles, so
/// `(i, j) == (j, i)` holds bit-for-bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index dim);

  /// Wraps `m`, which must already be exactly symmetric.
  static SymMatrix from_dense(const Matrix& m);
  /// Wraps (m + mᵀ)/2.
  static SymMatrix symmetrized(const Matrix& m);
  static SymMatrix identity(Index dim);
  static SymMatrix diagonal(const Vector& d);

  Index dim() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  void set(Index i, Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix& dense() const noexcept { return m_; }
  Vector diag() const { return m_.diagonal(); }

  SymMatrix scaled(double a) const;

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) { return a.m_ == b.m_; }

 private:
  Matrix m_;
};

/// Cholesky factor L (lower) with M = L·Lᵀ and cached log|M|.
class SpdFactor {
 public:
  const Matrix& lower() const noexcept { return l_; }
  double log_det() const noexcept { return log_det_; }
  Index dim() const noexcept { return l_.rows(); }

  /// Solves M·x = b.
  Vector solve(const Vector& b) const;
  SymMatrix inverse() const;

 private:
  friend SpdFactor spd_factorize(const SymMatrix& m);
  Matrix l_;
  double log_det_ = 0.0;
};

/// Throws NotPositiveDefinite carrying the failing pivot.
SpdFactor spd_factorize(const SymMatrix& m);

/// vᵀ·M·v evaluated as ‖Lᵀv‖².
double quad_form(const SpdFactor& f, const Vector& v);

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

/// Sum of |m_ij| over i ≠ j (both triangles).
double offdiag_l1(const SymMatrix& m);
/// max over i ≠ j of |m_ij|; 0 for 1×1.
double offdiag_max_abs(const SymMatrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// log Σ exp(v_i) with max subtraction; −∞ for an all −∞ input.
double log_sum_exp(const Vector& v);

/// Number of j ≤ k index pairs of a p×p symmetric matrix.
Index vech_size(Index p);

}  // namespace rggm
