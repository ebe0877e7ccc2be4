#pragma once

#include <optional>

#include "rggm/gamma_mm.hpp"

namespace rggm {

/// Biased sample covariance Σ (x_i − x̄)(x_i − x̄)ᵀ / n.
SymMatrix sample_covariance(const Dataset& X);

/// Graphical lasso on the biased sample covariance, computed directly rather
/// than through the γ = 0 branch of the MM fit.
FitResult fit_glasso(const Dataset& X, double lambda, const glasso::Options& inner = {1e-8, 500},
                     const std::optional<SymMatrix>& warm = std::nullopt);

/// Warm-started graphical-lasso path from max off-diagonal |S|.
SolutionPath glasso_path(const Dataset& X, int K = 10, double delta = 0.2, const glasso::Options& inner = {1e-8, 500});

struct TlassoConfig {
  double nu = 1.0;
  double lambda = 0.0;
  double tol = 1e-6;
  int max_iter = 200;
  glasso::Options inner{1e-8, 500};

  void validate() const;
};

/// ũ_i = (ν + p) / (ν + (x_i − μ)ᵀ Ω (x_i − μ)), before normalization.
Vector tlasso_raw_weights(const Dataset& X, const ModelParams& theta, double nu);

/// Penalized negative log-likelihood (per observation) of the multivariate t
/// with location μ, shape Ω⁻¹ and ν degrees of freedom.
double tlasso_objective(const Dataset& X, const ModelParams& theta, double nu, double lambda);

/// EM iteration with normalized weights u_i = ũ_i/Σũ_j:
///   μ ← Σ u_i x_i,  Ω ← argmin −log|Ω| + tr(Ω S_u(μ)) + λ‖Ω − diag Ω‖₁.
/// Stops on max-abs change of (μ, Ω) below cfg.tol. The trace is monitored
/// only; it is not guaranteed to decrease.
FitResult fit_tlasso(const Dataset& X, const TlassoConfig& cfg, const std::optional<ModelParams>& init = std::nullopt);

/// λ at which the t-lasso estimate becomes diagonal, taken at the diagonal
/// EM fixed point (max off-diagonal |S_u|).
double tlasso_lambda_max(const Dataset& X, double nu);

/// δ_n = 1 / (4 n^{1/4} √(π log n)).
double npn_delta(Index n);

/// Standard normal quantile; absolute error below 1e-9 on (0, 1).
double normal_quantile(double prob);

struct NpnConfig {
  /// Truncation level; empty means npn_delta(n).
  std::optional<double> delta_n;
  double lambda = 0.0;
  /// Feed the correlation matrix of the transformed data instead of its
  /// biased covariance.
  bool use_correlation = false;
  glasso::Options inner{1e-8, 500};

  void validate() const;
};

/// Columnwise μ̂_j + σ̂_j·Φ⁻¹(F̃_j(x)) with F̂_j = rank/(n+1) (ties averaged)
/// truncated to [δ_n, 1 − δ_n]; μ̂_j, σ̂_j are the column mean and standard
/// deviation.
Dataset npn_transform(const Dataset& X, const NpnConfig& cfg);

/// The covariance-like matrix handed to the graphical lasso.
SymMatrix npn_input_matrix(const Dataset& transformed, bool use_correlation);

/// npn_transform followed by the graphical lasso. Weights are uniform.
FitResult fit_nonparanormal(const Dataset& X, const NpnConfig& cfg);

/// λ above which the nonparanormal graphical lasso is diagonal.
double npn_lambda_max(const Dataset& X, const NpnConfig& cfg);

/// Warm-started t-lasso fits on lambda_grid(tlasso_lambda_max, K, δ);
/// cfg.lambda is ignored.
SolutionPath tlasso_path(const Dataset& X, const TlassoConfig& cfg, int K = 10, double delta = 0.2);

/// Nonparanormal fits on lambda_grid(npn_lambda_max, K, δ); the transform is
/// computed once. cfg.lambda is ignored.
SolutionPath npn_path(const Dataset& X, const NpnConfig& cfg, int K = 10, double delta = 0.2);

}  // namespace rggm
