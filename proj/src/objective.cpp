#include "rggm/objective.hpp"

#include <cmath>

namespace rggm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2π)

void require_nonempty(const Dataset& X, const ModelParams& theta) {
  if (X.n() < 1) throw EmptyDataset();
  if (X.p() != theta.dim()) throw DimensionMismatch("dataset and parameter dimensions differ");
}

double log_density_factored(const Vector& x, const Vector& mu, const SpdFactor& f) {
  const double p = static_cast<double>(mu.size());
  return -0.5 * p * kLog2Pi + 0.5 * f.log_det() - 0.5 * quad_form(f, x - mu);
}

// Coefficient on σ_jk in ∂/∂ω_jk of log|Ω| under symmetric tying.
inline double tie(Index j, Index k) { return j == k ? 1.0 : 2.0; }

}  // namespace

void ModelParams::validate() const {
  if (mu.size() != omega.dim()) throw DimensionMismatch("mu and omega dimensions differ");
  (void)spd_factorize(omega);
}

void RobustConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
}

double log_density(const Vector& x, const ModelParams& theta) {
  if (x.size() != theta.dim() || theta.omega.dim() != theta.dim())
    throw DimensionMismatch("log_density: dimension mismatch");
  return log_density_factored(x, theta.mu, spd_factorize(theta.omega));
}

Vector log_densities(const Dataset& X, const ModelParams& theta) {
  require_nonempty(X, theta);
  const SpdFactor f = spd_factorize(theta.omega);
  Vector out(X.n());
  for (Index i = 0; i < X.n(); ++i) out(i) = log_density_factored(X.x.row(i).transpose(), theta.mu, f);
  return out;
}

double ell2_closed_form(const SpdFactor& omega, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  const double p = static_cast<double>(omega.dim());
  return (-0.5 * gamma * p * kLog2Pi + 0.5 * gamma * omega.log_det() - 0.5 * p * std::log1p(gamma)) /
         (1.0 + gamma);
}

double ell2_closed_form(const SymMatrix& omega, double gamma) {
  return ell2_closed_form(spd_factorize(omega), gamma);
}

double gamma_l1(const Dataset& X, const ModelParams& theta, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  const Vector lf = log_densities(X, theta);
  const double n = static_cast<double>(X.n());
  if (gamma == 0.0) return -lf.mean();
  return -(log_sum_exp(gamma * lf) - std::log(n)) / gamma;
}

double neg_gamma_loglik(const Dataset& X, const ModelParams& theta, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  require_nonempty(X, theta);
  const SpdFactor f = spd_factorize(theta.omega);
  Vector lf(X.n());
  for (Index i = 0; i < X.n(); ++i) lf(i) = log_density_factored(X.x.row(i).transpose(), theta.mu, f);
  if (gamma == 0.0) return -lf.mean();
  const double n = static_cast<double>(X.n());
  return -(log_sum_exp(gamma * lf) - std::log(n)) / gamma + ell2_closed_form(f, gamma);
}

double l1_penalty(const SymMatrix& omega, double lambda) { return 0.5 * lambda * offdiag_l1(omega); }

double penalized_gamma_objective(const Dataset& X, const ModelParams& theta, const RobustConfig& cfg) {
  cfg.validate();
  return neg_gamma_loglik(X, theta, cfg.gamma) + l1_penalty(theta.omega, cfg.lambda);
}

double dp_b_beta(const SymMatrix& omega, double beta) {
  const SpdFactor f = spd_factorize(omega);
  const double p = static_cast<double>(omega.dim());
  return std::exp(0.5 * beta * f.log_det() - (1.0 + 0.5 * p) * std::log1p(beta) - 0.5 * p * beta * kLog2Pi);
}

double dp_objective(const Dataset& X, const ModelParams& theta, double beta, double lambda) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  const Vector lf = log_densities(X, theta);
  double s = 0.0;
  for (Index i = 0; i < lf.size(); ++i) s += std::exp(beta * lf(i));
  const double n = static_cast<double>(X.n());
  return -s / (n * beta) + dp_b_beta(theta.omega, beta) + l1_penalty(theta.omega, lambda);
}

Index param_size(Index p) { return p + vech_size(p); }

Vector score(const Vector& x, const ModelParams& theta) {
  const Index p = theta.dim();
  if (x.size() != p) throw DimensionMismatch("score: dimension mismatch");
  const SpdFactor f = spd_factorize(theta.omega);
  const Matrix sigma = f.inverse().dense();
  const Vector d = x - theta.mu;
  Vector s(param_size(p));
  s.head(p) = theta.omega.dense() * d;
  Index pos = p;
  for (Index j = 0; j < p; ++j)
    for (Index k = j; k < p; ++k) s(pos++) = 0.5 * tie(j, k) * (sigma(j, k) - d(j) * d(k));
  return s;
}

Vector default_subgradient(const ModelParams& theta) {
  const Index p = theta.dim();
  Vector u = Vector::Zero(param_size(p));
  Index pos = p;
  for (Index j = 0; j < p; ++j)
    for (Index k = j; k < p; ++k, ++pos) {
      if (j == k) continue;
      const double w = theta.omega(j, k);
      u(pos) = w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
    }
  return u;
}

Vector kernel(const Vector& x, const ModelParams& theta, const KernelInput& k, KernelMethod method) {
  k.config.validate();
  const Index p = theta.dim();
  const Index m = param_size(p);
  if (k.subgrad_u.size() != m) throw DimensionMismatch("kernel: subgradient has wrong length");
  for (Index i = 0; i < m; ++i)
    if (!(std::abs(k.subgrad_u(i)) <= 1.0)) throw std::invalid_argument("kernel: subgradient entries must lie in [-1, 1]");

  const SpdFactor f = spd_factorize(theta.omega);
  const Matrix sigma = f.inverse().dense();
  const double g = k.config.gamma;
  const double lf = log_density_factored(x, theta.mu, f);
  const double fg = std::exp(g * lf);  // underflows to 0 for gross outliers
  const Vector s = score(x, theta);
  const Vector pen = 0.5 * k.config.lambda * k.subgrad_u;

  // Gradient of the x-free term: ℓ2 for gamma, b_β for dp. Zero on μ.
  Vector grad = Vector::Zero(m);
  const double coef = method == KernelMethod::gamma
                           ? g / (2.0 * (1.0 + g))
                           : 0.5 * g * dp_b_beta(theta.omega, g);
  Index pos = p;
  for (Index j = 0; j < p; ++j)
    for (Index c = j; c < p; ++c) grad(pos++) = coef * tie(j, c) * sigma(j, c);

  if (method == KernelMethod::gamma) return fg * (s - grad - pen);
  if (!(g > 0.0)) throw std::invalid_argument("dp kernel requires beta > 0");
  return -fg * s + grad + pen;
}

double kernel_norm(const Vector& x, const ModelParams& theta, const KernelInput& k, KernelMethod method) {
  return kernel(x, theta, k, method).norm();
}

}  // namespace rggm
