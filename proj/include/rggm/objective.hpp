#pragma once

#include "rggm/dataset.hpp"
#include "rggm/matcore.hpp"

namespace rggm {

/// Gaussian parameters θ = (μ, Ω) with Ω the precision matrix.
struct ModelParams {
  Vector mu;
  SymMatrix omega;

  Index dim() const noexcept { return mu.size(); }
  /// Checks dimensions and positive definiteness.
  void validate() const;
};

struct RobustConfig {
  double gamma = 0.0;
  double lambda = 0.0;

  void validate() const;
};

/// log f(x; θ) for the multivariate normal.
double log_density(const Vector& x, const ModelParams& theta);
/// log f(x_i; θ) for every row of X, sharing one factorization.
Vector log_densities(const Dataset& X, const ModelParams& theta);

/// (1/(1+γ))·log ∫ f^{1+γ} dx in closed form; depends on Ω only.
double ell2_closed_form(const SymMatrix& omega, double gamma);
double ell2_closed_form(const SpdFactor& omega, double gamma);

/// −(1/γ)·log{(1/n)Σ f(x_i;θ)^γ}, evaluated in the log domain.
/// At γ = 0 returns the mean negative log-likelihood.
double gamma_l1(const Dataset& X, const ModelParams& theta, double gamma);

/// ℓ1 + ℓ2. γ = 0 is an exact branch returning the mean negative log-likelihood.
double neg_gamma_loglik(const Dataset& X, const ModelParams& theta, double gamma);

/// (λ/2)·Σ_{i≠j} |ω_ij|.
double l1_penalty(const SymMatrix& omega, double lambda);

double penalized_gamma_objective(const Dataset& X, const ModelParams& theta, const RobustConfig& cfg);

/// |Ω|^{β/2} / ((1+β)^{1+p/2} (2π)^{pβ/2}); equals (1/(1+β))∫ f^{1+β}.
double dp_b_beta(const SymMatrix& omega, double beta);

/// −(1/(nβ))Σ f_i^β + b_β(θ) + (λ/2)‖Ω − diag Ω‖₁.
double dp_objective(const Dataset& X, const ModelParams& theta, double beta, double lambda);

// -- estimating-equation kernels ---------------------------------------------
//
// Parameter vectors are laid out as [μ_0..μ_{p-1}, vech(Ω)] where vech walks
// the upper triangle row by row: (0,0),(0,1),...,(0,p-1),(1,1),...,(p-1,p-1).
// Off-diagonal coordinates move ω_jk and ω_kj together.

Index param_size(Index p);

/// ∂ log f(x;θ) / ∂θ.
Vector score(const Vector& x, const ModelParams& theta);

/// Subgradient of the off-diagonal penalty: sign(ω_jk) on off-diagonal
/// coordinates (0 where ω_jk = 0), 0 on μ and diagonal coordinates.
Vector default_subgradient(const ModelParams& theta);

struct KernelInput {
  Vector subgrad_u;
  RobustConfig config;
};

enum class KernelMethod { gamma, dp };

/// ψ(x;θ). For `gamma`: f^γ·[s − ∂ℓ2/∂θ − (λ/2)u]. For `dp` (β = config.gamma):
/// −f^β·s + ∂b_β/∂θ + (λ/2)u, whose second term does not decay in x.
Vector kernel(const Vector& x, const ModelParams& theta, const KernelInput& k, KernelMethod method);
double kernel_norm(const Vector& x, const ModelParams& theta, const KernelInput& k, KernelMethod method);

}  // namespace rggm
