#include "rggm/matcore.hpp"

#include <cmath>
#include <limits>

namespace rggm {

SymMatrix::SymMatrix(Index dim) : m_(Matrix::Zero(dim, dim)) {
  if (dim < 1) throw DimensionMismatch("SymMatrix dimension must be >= 1");
}

SymMatrix SymMatrix::from_dense(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw DimensionMismatch("matrix must be square and non-empty");
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + 1; i < m.rows(); ++i)
      if (m(i, j) != m(j, i)) throw NotSymmetric("matrix is not exactly symmetric");
  SymMatrix s;
  s.m_ = m;
  return s;
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw DimensionMismatch("matrix must be square and non-empty");
  SymMatrix s(m.rows());
  for (Index j = 0; j < m.cols(); ++j) {
    s.m_(j, j) = m(j, j);
    for (Index i = j + 1; i < m.rows(); ++i) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  }
  return s;
}

SymMatrix SymMatrix::identity(Index dim) {
  SymMatrix s(dim);
  s.m_.setIdentity();
  return s;
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  SymMatrix s(d.size());
  s.m_.diagonal() = d;
  return s;
}

SymMatrix SymMatrix::scaled(double a) const {
  SymMatrix s;
  s.m_ = a * m_;
  return s;
}

SpdFactor spd_factorize(const SymMatrix& m) {
  const Index p = m.dim();
  const Matrix& a = m.dense();
  SpdFactor f;
  f.l_ = Matrix::Zero(p, p);
  Matrix& l = f.l_;
  double log_det = 0.0;
  for (Index j = 0; j < p; ++j) {
    double d = a(j, j);
    for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) throw NotPositiveDefinite(static_cast<int>(j));
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    log_det += 2.0 * std::log(ljj);
    for (Index i = j + 1; i < p; ++i) {
      double s = a(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  f.log_det_ = log_det;
  return f;
}

Vector SpdFactor::solve(const Vector& b) const {
  if (b.size() != dim()) throw DimensionMismatch("solve: dimension mismatch");
  Vector y = l_.triangularView<Eigen::Lower>().solve(b);
  return l_.transpose().triangularView<Eigen::Upper>().solve(y);
}

SymMatrix SpdFactor::inverse() const {
  const Index p = dim();
  Matrix linv = l_.triangularView<Eigen::Lower>().solve(Matrix::Identity(p, p));
  return SymMatrix::symmetrized(linv.transpose() * linv);
}

double quad_form(const SpdFactor& f, const Vector& v) {
  if (v.size() != f.dim()) throw DimensionMismatch("quad_form: dimension mismatch");
  const Matrix& l = f.lower();
  const Index p = f.dim();
  double acc = 0.0;
  // (Lᵀv)_k = Σ_{i ≥ k} L_ik v_i
  for (Index k = 0; k < p; ++k) {
    double t = 0.0;
    for (Index i = k; i < p; ++i) t += l(i, k) * v(i);
    acc += t * t;
  }
  return acc;
}

double offdiag_l1(const SymMatrix& m) {
  double s = 0.0;
  for (Index j = 0; j < m.dim(); ++j)
    for (Index i = j + 1; i < m.dim(); ++i) s += std::abs(m(i, j));
  return 2.0 * s;
}

double offdiag_max_abs(const SymMatrix& m) {
  double s = 0.0;
  for (Index j = 0; j < m.dim(); ++j)
    for (Index i = j + 1; i < m.dim(); ++i) s = std::max(s, std::abs(m(i, j)));
  return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("max_abs_diff: shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

double log_sum_exp(const Vector& v) {
  if (v.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::exp(v(i) - m);
  return m + std::log(s);
}

Index vech_size(Index p) { return p * (p + 1) / 2; }

}  // namespace rggm
