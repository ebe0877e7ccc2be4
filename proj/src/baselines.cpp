#include "rggm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rggm {

namespace {

constexpr double kDiagonalSlack = 1e-10;

SymMatrix scatter_or_throw(const Dataset& X, const Vector& mu, const WeightVector& w) {
  SymMatrix s = weighted_scatter(X, mu, w);
  for (Index j = 0; j < s.dim(); ++j)
    if (!(s(j, j) > 0.0)) throw DegenerateScatter("weighted scatter has a zero diagonal entry");
  return s;
}

WeightVector normalized(const Vector& raw) { return WeightVector{raw / raw.sum()}; }

}  // namespace

void TlassoConfig::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be finite and > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

Vector tlasso_raw_weights(const Dataset& X, const ModelParams& theta, double nu) {
  if (X.p() != theta.dim()) throw DimensionMismatch("tlasso: dimension mismatch");
  const SpdFactor f = spd_factorize(theta.omega);
  const double p = static_cast<double>(X.p());
  Vector u(X.n());
  for (Index i = 0; i < X.n(); ++i) u(i) = (nu + p) / (nu + quad_form(f, X.x.row(i).transpose() - theta.mu));
  return u;
}

double tlasso_objective(const Dataset& X, const ModelParams& theta, double nu, double lambda) {
  const SpdFactor f = spd_factorize(theta.omega);
  const double p = static_cast<double>(X.p());
  const double norm = std::lgamma(0.5 * (nu + p)) - std::lgamma(0.5 * nu) - 0.5 * p * std::log(std::numbers::pi * nu) +
                      0.5 * f.log_det();
  double nll = 0.0;
  for (Index i = 0; i < X.n(); ++i) {
    const double q = quad_form(f, X.x.row(i).transpose() - theta.mu);
    nll -= norm - 0.5 * (nu + p) * std::log1p(q / nu);
  }
  return nll / static_cast<double>(X.n()) + l1_penalty(theta.omega, lambda);
}

FitResult fit_tlasso(const Dataset& X, const TlassoConfig& cfg, const std::optional<ModelParams>& init) {
  cfg.validate();
  if (X.n() < 2) throw EmptyDataset();
  FitResult res;
  res.config = RobustConfig{0.0, cfg.lambda};
  res.theta = init ? *init : robust_init(X);
  res.theta.validate();
  res.objective_trace.push_back(tlasso_objective(X, res.theta, cfg.nu, cfg.lambda));

  for (int it = 1; it <= cfg.max_iter; ++it) {
    const WeightVector u = normalized(tlasso_raw_weights(X, res.theta, cfg.nu));
    const Vector mu = X.x.transpose() * u.w;
    const SymMatrix s = scatter_or_throw(X, mu, u);
    const glasso::Solution sol = glasso::solve({s, cfg.lambda, 1.0}, res.theta.omega, cfg.inner);
    res.inner_kkt_max = std::max(res.inner_kkt_max, sol.kkt_residual);

    const double change = std::max((mu - res.theta.mu).cwiseAbs().maxCoeff(),
                                   max_abs_diff(sol.omega.dense(), res.theta.omega.dense()));
    res.theta = ModelParams{mu, sol.omega};
    res.objective_trace.push_back(tlasso_objective(X, res.theta, cfg.nu, cfg.lambda));
    res.mm_iterations = it;
    if (change < cfg.tol) {
      res.converged = true;
      break;
    }
  }
  res.weights = normalized(tlasso_raw_weights(X, res.theta, cfg.nu));
  return res;
}

namespace {

/// EM fixed point restricted to diagonal Ω; at λ ≥ λ_max this is the fit.
ModelParams tlasso_diagonal_fit(const Dataset& X, double nu) {
  ModelParams theta = robust_init(X);
  const Index p = X.p();
  for (int it = 0; it < 100000; ++it) {
    const WeightVector u = normalized(tlasso_raw_weights(X, theta, nu));
    const Vector mu = X.x.transpose() * u.w;
    Vector prec(p);
    for (Index j = 0; j < p; ++j) {
      const double d = (u.w.array() * (X.x.col(j).array() - mu(j)).square()).sum();
      if (!(d > 0.0)) throw DegenerateScatter("weighted variance collapsed");
      prec(j) = 1.0 / d;
    }
    const double change = std::max((mu - theta.mu).cwiseAbs().maxCoeff(),
                                   ((prec - theta.omega.diag()).array().abs() / prec.array()).maxCoeff());
    theta = ModelParams{mu, SymMatrix::diagonal(prec)};
    if (change <= 1e-13) break;
  }
  return theta;
}

}  // namespace

double tlasso_lambda_max(const Dataset& X, double nu) {
  if (X.p() < 2) throw std::invalid_argument("lambda_max requires p >= 2");
  const ModelParams theta = tlasso_diagonal_fit(X, nu);
  const WeightVector u = normalized(tlasso_raw_weights(X, theta, nu));
  const Vector mu = X.x.transpose() * u.w;
  return offdiag_max_abs(weighted_scatter(X, mu, u)) * (1.0 + kDiagonalSlack);
}

double npn_delta(Index n) {
  if (n < 2) throw std::invalid_argument("npn_delta requires n >= 2");
  const double nn = static_cast<double>(n);
  return 1.0 / (4.0 * std::pow(nn, 0.25) * std::sqrt(std::numbers::pi * std::log(nn)));
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("normal_quantile: probability must lie in (0, 1)");
  if (prob > 0.5) return -normal_quantile(1.0 - prob);  // 1 − prob is exact here
  // Acklam's rational approximation, then one Halley step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double lo = 0.02425;
  double x;
  if (prob < lo) {
    const double q = std::sqrt(-2.0 * std::log(prob));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = prob - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - prob;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

void NpnConfig::validate() const {
  if (delta_n && !(*delta_n > 0.0 && *delta_n < 0.5)) throw std::invalid_argument("delta_n must lie in (0, 0.5)");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
}

Dataset npn_transform(const Dataset& X, const NpnConfig& cfg) {
  cfg.validate();
  const Index n = X.n();
  if (n < 2) throw EmptyDataset();
  const double delta = cfg.delta_n ? *cfg.delta_n : npn_delta(n);
  Dataset out(Matrix(n, X.p()));
  out.names = X.names;
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index j = 0; j < X.p(); ++j) {
    const auto col = X.x.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw DegenerateColumn(static_cast<int>(j));

    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return col(a) < col(b); });
    for (Index start = 0; start < n;) {
      Index end = start + 1;
      while (end < n && col(order[static_cast<std::size_t>(end)]) == col(order[static_cast<std::size_t>(start)])) ++end;
      // average of 1-based ranks start+1 .. end
      const double rank = 0.5 * static_cast<double>(start + 1 + end);
      const double f = std::clamp(rank / static_cast<double>(n + 1), delta, 1.0 - delta);
      const double z = mean + sd * normal_quantile(f);
      for (Index t = start; t < end; ++t) out.x(order[static_cast<std::size_t>(t)], j) = z;
      start = end;
    }
  }
  return out;
}

SymMatrix npn_input_matrix(const Dataset& z, bool use_correlation) {
  const Vector mu = z.x.colwise().mean().transpose();
  const WeightVector uniform{Vector::Constant(z.n(), 1.0 / static_cast<double>(z.n()))};
  SymMatrix s = weighted_scatter(z, mu, uniform);
  if (!use_correlation) return s;
  const Vector inv_sd = s.diag().array().rsqrt();
  Matrix c = inv_sd.asDiagonal() * s.dense() * inv_sd.asDiagonal();
  c.diagonal().setOnes();
  return SymMatrix::symmetrized(c);
}

namespace {

FitResult npn_fit_on(const Dataset& z, const SymMatrix& s, double lambda, const NpnConfig& cfg,
                     const std::optional<SymMatrix>& warm) {
  const glasso::Solution sol = glasso::solve({s, lambda, 1.0}, warm, cfg.inner);
  FitResult res;
  res.config = RobustConfig{0.0, lambda};
  res.theta = ModelParams{z.x.colwise().mean().transpose(), sol.omega};
  res.weights = WeightVector{Vector::Constant(z.n(), 1.0 / static_cast<double>(z.n()))};
  res.objective_trace.push_back(glasso::objective(sol.omega, {s, lambda, 1.0}));
  res.converged = true;
  res.mm_iterations = sol.iterations;
  res.inner_kkt_max = sol.kkt_residual;
  return res;
}

template <class Fn>
void push_path_point(SolutionPath& path, double lambda, const ModelParams& fallback, Index n, Fn&& run) {
  try {
    FitResult f = run();
    path.status.push_back(f.converged ? PathStatus::ok : PathStatus::not_converged);
    path.messages.emplace_back();
    path.fits.push_back(std::move(f));
  } catch (const Error& e) {
    FitResult f;
    f.theta = fallback;
    f.config = RobustConfig{0.0, lambda};
    f.weights = WeightVector{Vector::Constant(n, 1.0 / static_cast<double>(n))};
    path.status.push_back(PathStatus::failed);
    path.messages.emplace_back(e.what());
    path.fits.push_back(std::move(f));
  }
}

}  // namespace

SymMatrix sample_covariance(const Dataset& X) {
  if (X.n() < 1) throw EmptyDataset();
  const Vector mu = X.x.colwise().mean().transpose();
  return weighted_scatter(X, mu, WeightVector{Vector::Constant(X.n(), 1.0 / static_cast<double>(X.n()))});
}

FitResult fit_glasso(const Dataset& X, double lambda, const glasso::Options& inner,
                     const std::optional<SymMatrix>& warm) {
  if (X.n() < 2) throw EmptyDataset();
  const SymMatrix s = sample_covariance(X);
  const glasso::Solution sol = glasso::solve({s, lambda, 1.0}, warm, inner);
  FitResult res;
  res.config = RobustConfig{0.0, lambda};
  res.theta = ModelParams{X.x.colwise().mean().transpose(), sol.omega};
  res.weights = WeightVector{Vector::Constant(X.n(), 1.0 / static_cast<double>(X.n()))};
  res.objective_trace.push_back(penalized_gamma_objective(X, res.theta, res.config));
  res.converged = true;
  res.mm_iterations = sol.iterations;
  res.inner_kkt_max = sol.kkt_residual;
  return res;
}

SolutionPath glasso_path(const Dataset& X, int K, double delta, const glasso::Options& inner) {
  if (X.p() < 2) throw std::invalid_argument("lambda_max requires p >= 2");
  const SymMatrix s = sample_covariance(X);
  SolutionPath path;
  path.lambda_max = offdiag_max_abs(s) * (1.0 + kDiagonalSlack);
  path.lambdas = lambda_grid(path.lambda_max, K, delta);
  std::optional<SymMatrix> warm;
  ModelParams fallback{X.x.colwise().mean().transpose(), SymMatrix::diagonal(s.diag().cwiseInverse())};
  for (double lam : path.lambdas) {
    push_path_point(path, lam, fallback, X.n(), [&] { return fit_glasso(X, lam, inner, warm); });
    if (path.status.back() != PathStatus::failed) {
      warm = path.fits.back().theta.omega;
      fallback = path.fits.back().theta;
    }
  }
  return path;
}

double npn_lambda_max(const Dataset& X, const NpnConfig& cfg) {
  if (X.p() < 2) throw std::invalid_argument("lambda_max requires p >= 2");
  return offdiag_max_abs(npn_input_matrix(npn_transform(X, cfg), cfg.use_correlation)) * (1.0 + kDiagonalSlack);
}

SolutionPath tlasso_path(const Dataset& X, const TlassoConfig& cfg, int K, double delta) {
  cfg.validate();
  SolutionPath path;
  path.lambda_max = tlasso_lambda_max(X, cfg.nu);
  path.lambdas = lambda_grid(path.lambda_max, K, delta);
  std::optional<ModelParams> current = tlasso_diagonal_fit(X, cfg.nu);
  for (double lam : path.lambdas) {
    TlassoConfig c = cfg;
    c.lambda = lam;
    const ModelParams fallback = current ? *current : robust_init(X);
    push_path_point(path, lam, fallback, X.n(), [&] { return fit_tlasso(X, c, current); });
    if (path.status.back() != PathStatus::failed) current = path.fits.back().theta;
  }
  return path;
}

SolutionPath npn_path(const Dataset& X, const NpnConfig& cfg, int K, double delta) {
  const Dataset z = npn_transform(X, cfg);
  const SymMatrix s = npn_input_matrix(z, cfg.use_correlation);
  SolutionPath path;
  path.lambda_max = offdiag_max_abs(s) * (1.0 + kDiagonalSlack);
  path.lambdas = lambda_grid(path.lambda_max, K, delta);
  std::optional<SymMatrix> warm;
  ModelParams fallback{z.x.colwise().mean().transpose(), SymMatrix::diagonal(s.diag().cwiseInverse())};
  for (double lam : path.lambdas) {
    push_path_point(path, lam, fallback, X.n(), [&] { return npn_fit_on(z, s, lam, cfg, warm); });
    if (path.status.back() != PathStatus::failed) {
      warm = path.fits.back().theta.omega;
      fallback = path.fits.back().theta;
    }
  }
  return path;
}

FitResult fit_nonparanormal(const Dataset& X, const NpnConfig& cfg) {
  const Dataset z = npn_transform(X, cfg);
  return npn_fit_on(z, npn_input_matrix(z, cfg.use_correlation), cfg.lambda, cfg, std::nullopt);
}

}  // namespace rggm
