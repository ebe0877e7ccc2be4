#pragma once

#include <Eigen/Cholesky>

#include "rggm/dataset.hpp"
#include "rggm/eval.hpp"
#include "rggm/simgen.hpp"

namespace fixture {

using namespace rggm;

/// Five-node precision matrix with edges 1–2, 1–3, 2–5, 3–4 at 0.3.
inline SymMatrix five_node_omega() {
  Matrix m = Matrix::Identity(5, 5);
  for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 4}, {2, 3}}) m(i, j) = m(j, i) = 0.3;
  return SymMatrix::from_dense(m);
}

inline EdgeSet five_node_edges() {
  EdgeSet e(5);
  e.add(0, 1);
  e.add(0, 2);
  e.add(1, 4);
  e.add(2, 3);
  return e;
}

struct Mixture {
  Dataset data;
  std::vector<bool> outlier;
};

/// (1−ε)·N(0, Ω⁻¹) + ε·N(shift·1, I). Uses Eigen's LLT, not the library's.
inline Mixture five_node_mixture(Index n, double eps, double shift, std::uint64_t seed) {
  const Matrix sigma = five_node_omega().dense().inverse();
  const Matrix l = sigma.llt().matrixL();
  Rng rng(seed);
  Mixture m{Dataset(Matrix(n, 5)), std::vector<bool>(static_cast<std::size_t>(n))};
  Vector z(5);
  for (Index i = 0; i < n; ++i) {
    const bool bad = rng.uniform() < eps;
    for (Index j = 0; j < 5; ++j) z(j) = rng.normal();
    m.outlier[static_cast<std::size_t>(i)] = bad;
    if (bad)
      m.data.x.row(i) = (z.array() + shift).matrix().transpose();
    else
      m.data.x.row(i) = (l * z).transpose();
  }
  return m;
}

/// Correlated Gaussian data from a random dense covariance.
inline Dataset correlated(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) a(i, j) = (i == j ? 1.0 : 0.0) + 0.4 * rng.normal();
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = rng.normal();
  return Dataset(x * a.transpose());
}

}  // namespace fixture
