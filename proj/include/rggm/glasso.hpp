#pragma once

#include <optional>
#include <vector>

#include "rggm/matcore.hpp"

namespace rggm::glasso {

/// minimize  −κ·log|Ω| + tr(Ω·S) + λ·Σ_{i≠j}|ω_ij|  over positive-definite Ω.
struct Problem {
  SymMatrix s;
  double lambda = 0.0;
  double logdet_scale = 1.0;

  /// Throws NonPositiveDiagonal / std::invalid_argument.
  void validate() const;
};

struct Solution {
  SymMatrix omega;
  SymMatrix sigma;
  int iterations = 0;
  double kkt_residual = 0.0;
  /// Standard-form objective after each sweep (index 0 is the start point).
  std::vector<double> objective_trace;
};

struct Options {
  double tol = 1e-6;
  int max_sweeps = 500;
};

class MaxSweepsExceeded : public Error {
 public:
  MaxSweepsExceeded(SymMatrix last, double residual, int sweeps);
  const SymMatrix& last_iterate() const noexcept { return last_; }
  double residual() const noexcept { return residual_; }
  int sweeps() const noexcept { return sweeps_; }

 private:
  SymMatrix last_;
  double residual_;
  int sweeps_;
};

/// Rescales to κ = 1: S' = S/κ and λ' = λ/κ. The minimizer is unchanged.
Problem reduce_to_standard(const Problem& p);

/// Standard-form objective −log|Ω| + tr(ΩS) + λ‖Ω − diag Ω‖₁, with κ applied.
double objective(const SymMatrix& omega, const Problem& p);

/// Blockwise coordinate descent over the columns of Ω in ascending order.
/// Each block minimizes the objective exactly over (ω_{·j}, ω_jj) through a
/// lasso in ω_{·j} solved by cyclic coordinate descent; Σ = Ω⁻¹ is carried
/// alongside and refreshed by a Cholesky inverse after every sweep.
///
/// Stops when the mean absolute change of Σ over a sweep is at most
/// tol·mean|offdiag S| and the KKT residual is at most 10·tol.
Solution solve(const Problem& p, const std::optional<SymMatrix>& init = std::nullopt, const Options& opt = {});

/// Max violation of the optimality conditions of the standard-form problem.
double kkt_residual(const SymMatrix& omega, const Problem& p);

}  // namespace rggm::glasso
