#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rggm/glasso.hpp"
#include "rggm/objective.hpp"

namespace rggm {

/// Nonnegative observation weights summing to one.
struct WeightVector {
  Vector w;
};

struct FitResult {
  ModelParams theta;
  WeightVector weights;
  /// Penalized objective at the initial point and after every iteration.
  std::vector<double> objective_trace;
  bool converged = false;
  int mm_iterations = 0;
  RobustConfig config;
  /// Largest KKT residual among the inner graphical-lasso solves.
  double inner_kkt_max = 0.0;
};

enum class PathStatus { ok, not_converged, failed };

struct SolutionPath {
  std::vector<double> lambdas;
  std::vector<FitResult> fits;
  std::vector<PathStatus> status;
  std::vector<std::string> messages;
  double gamma = 0.0;
  double lambda_max = 0.0;
};

struct UnivariateFit {
  double mu = 0.0;
  double sigma2 = 1.0;
  int iterations = 0;
};

struct FitOptions {
  double tol = 1e-7;
  int max_iter = 200;
  glasso::Options inner{1e-8, 500};
  /// Invoked with every iterate, including the initial point.
  std::function<void(const ModelParams&)> on_iterate;
};

/// w_i ∝ f(x_i;θ)^γ, normalized in the log domain.
WeightVector compute_weights(const Dataset& X, const ModelParams& theta, double gamma);

/// Σ_i w_i (x_i − μ)(x_i − μ)ᵀ.
SymMatrix weighted_scatter(const Dataset& X, const Vector& mu, const WeightVector& w);

/// Coordinatewise median and diag(1/mad_j²) with the adjusted MAD. Falls back
/// to the standard deviation for a column whose MAD is zero.
ModelParams robust_init(const Dataset& X);

/// Weighted negative log-likelihood majorizer of ℓ1 at θ_t, including the
/// θ-free constant (1/γ)Σ w log w + (1/γ) log n. Requires γ > 0.
double majorizer_l1(const Dataset& X, const ModelParams& theta, const ModelParams& theta_t, double gamma);

struct MmStep {
  ModelParams theta;
  WeightVector weights;
  double objective = 0.0;
  double inner_kkt = 0.0;
};

/// One MM iteration: weights at θ_t, weighted mean, then the Ω problem
/// −(1/(1+γ))log|Ω| + tr(Ω S_w) + λ‖Ω − diag Ω‖₁ warm-started at Ω_t.
MmStep mm_step(const Dataset& X, const ModelParams& theta_t, const RobustConfig& cfg,
               const glasso::Options& inner = {1e-8, 500});

/// Runs MM from `init` (robust_init when absent) until the relative change of
/// the penalized objective drops below opt.tol. Non-convergence within
/// opt.max_iter is reported through `converged`, not an exception.
FitResult fit(const Dataset& X, const RobustConfig& cfg, const std::optional<ModelParams>& init = std::nullopt,
              const FitOptions& opt = {});

/// Univariate γ-estimator by the fixed-point iteration
///   μ ← Σ w_i x_i,  σ² ← (1+γ) Σ w_i (x_i − μ)²,  w_i ∝ exp(−γ(x_i−μ)²/(2σ²))
/// started at median / adjusted MAD.
UnivariateFit univariate_gamma_fit(const std::vector<double>& x, double gamma, double tol = 1e-12,
                                   int max_iter = 10000);

struct LambdaMax {
  double lambda = 0.0;
  /// Diagonal fixed point of the γ-lasso; from here every λ ≥ `lambda`
  /// leaves the estimate diagonal.
  ModelParams theta;
  WeightVector weights;
};

/// λ₁ = ‖S_w − Diag(S_w)‖_∞ at the diagonal γ-estimator.
LambdaMax lambda_max(const Dataset& X, double gamma);

/// λ_k = λ₁·δ^{k/(K−1)}, k = 0..K−1; the last entry is exactly λ₁·δ.
std::vector<double> lambda_grid(double lambda1, int K, double delta);

/// Warm-started fits on the geometric grid, starting at the diagonal fixed
/// point returned by lambda_max.
SolutionPath solution_path(const Dataset& X, double gamma, int K = 10, double delta = 0.2,
                           const FitOptions& opt = {});

}  // namespace rggm
