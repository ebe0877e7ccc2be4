#include "rggm/gamma_mm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rggm {

namespace {

// Allowance on λ₁ for the tolerance of the diagonal fixed point: a fresh
// weighted scatter there can exceed the recorded off-diagonal maximum by a
// few ulps, which would otherwise leak ~1e-16 entries into Ω.
constexpr double kLambdaMaxSlack = 1e-10;

Vector log_weights(const Dataset& X, const ModelParams& theta, double gamma) {
  const Vector lf = log_densities(X, theta);
  if (gamma == 0.0) return Vector::Constant(X.n(), -std::log(static_cast<double>(X.n())));
  const Vector z = gamma * lf;
  return z.array() - log_sum_exp(z);
}

void check_scatter(const SymMatrix& s, const WeightVector& w) {
  if (w.w.size() > 1 && w.w.maxCoeff() >= 1.0 - 1e-12)
    throw DegenerateScatter("weights collapsed onto a single observation");
  for (Index j = 0; j < s.dim(); ++j)
    if (!(s(j, j) > 0.0) || !std::isfinite(s(j, j)))
      throw DegenerateScatter("weighted scatter has a zero diagonal entry at " + std::to_string(j));
}

bool descended(double next, double prev) { return next <= prev + 1e-10 * std::abs(prev); }

}  // namespace

WeightVector compute_weights(const Dataset& X, const ModelParams& theta, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  return WeightVector{log_weights(X, theta, gamma).array().exp()};
}

SymMatrix weighted_scatter(const Dataset& X, const Vector& mu, const WeightVector& w) {
  if (mu.size() != X.p() || w.w.size() != X.n()) throw DimensionMismatch("weighted_scatter: dimension mismatch");
  const Index p = X.p();
  Matrix s = Matrix::Zero(p, p);
  for (Index i = 0; i < X.n(); ++i) {
    const Vector d = X.x.row(i).transpose() - mu;
    s.selfadjointView<Eigen::Lower>().rankUpdate(d, w.w(i));
  }
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return SymMatrix::from_dense(s);
}

ModelParams robust_init(const Dataset& X) {
  if (X.n() < 2) throw EmptyDataset();
  const Index p = X.p();
  Vector mu(p), prec(p);
  for (Index j = 0; j < p; ++j) {
    const auto c = column(X, j);
    mu(j) = median(c);
    double scale = kMadConstant * raw_mad(c);
    if (!(scale > 0.0)) {
      const double mean = X.x.col(j).mean();
      scale = std::sqrt((X.x.col(j).array() - mean).square().sum() / static_cast<double>(X.n() - 1));
    }
    if (!(scale > 0.0)) throw DegenerateSample("column " + std::to_string(j) + " is constant");
    prec(j) = 1.0 / (scale * scale);
  }
  return ModelParams{mu, SymMatrix::diagonal(prec)};
}

double majorizer_l1(const Dataset& X, const ModelParams& theta, const ModelParams& theta_t, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("majorizer requires gamma > 0");
  const Vector lw = log_weights(X, theta_t, gamma);
  const Vector lf = log_densities(X, theta);
  double val = 0.0;
  double entropy = 0.0;
  for (Index i = 0; i < X.n(); ++i) {
    const double w = std::exp(lw(i));
    if (w == 0.0) continue;
    val -= w * lf(i);
    entropy += w * lw(i);
  }
  return val + (entropy + std::log(static_cast<double>(X.n()))) / gamma;
}

MmStep mm_step(const Dataset& X, const ModelParams& theta_t, const RobustConfig& cfg, const glasso::Options& inner) {
  cfg.validate();
  const WeightVector w = compute_weights(X, theta_t, cfg.gamma);
  const Vector mu = X.x.transpose() * w.w;
  const SymMatrix s = weighted_scatter(X, mu, w);
  check_scatter(s, w);

  const glasso::Problem problem{s, cfg.lambda, 1.0 / (1.0 + cfg.gamma)};
  const double before = penalized_gamma_objective(X, theta_t, cfg);

  glasso::Solution sol = glasso::solve(problem, theta_t.omega, inner);
  ModelParams next{mu, sol.omega};
  double after = penalized_gamma_objective(X, next, cfg);
  double kkt = sol.kkt_residual;
  if (!descended(after, before)) {
    // Inner inexactness can surface once MM is within rounding of a fixed point.
    glasso::Options tight = inner;
    tight.tol *= 1e-2;
    tight.max_sweeps *= 2;
    sol = glasso::solve(problem, std::nullopt, tight);
    next = ModelParams{mu, sol.omega};
    after = penalized_gamma_objective(X, next, cfg);
    kkt = std::max(kkt, sol.kkt_residual);
    if (!descended(after, before)) return MmStep{theta_t, w, before, kkt};
  }
  return MmStep{std::move(next), w, after, kkt};
}

FitResult fit(const Dataset& X, const RobustConfig& cfg, const std::optional<ModelParams>& init,
              const FitOptions& opt) {
  cfg.validate();
  if (X.n() < 2) throw EmptyDataset();
  FitResult res;
  res.config = cfg;
  res.theta = init ? *init : robust_init(X);
  res.theta.validate();
  if (res.theta.dim() != X.p()) throw DimensionMismatch("initial parameters do not match the dataset");

  double obj = penalized_gamma_objective(X, res.theta, cfg);
  res.objective_trace.push_back(obj);
  if (opt.on_iterate) opt.on_iterate(res.theta);

  for (int it = 1; it <= opt.max_iter; ++it) {
    MmStep step = mm_step(X, res.theta, cfg, opt.inner);
    res.theta = std::move(step.theta);
    res.inner_kkt_max = std::max(res.inner_kkt_max, step.inner_kkt);
    res.objective_trace.push_back(step.objective);
    res.mm_iterations = it;
    if (opt.on_iterate) opt.on_iterate(res.theta);
    const double change = std::abs(obj - step.objective);
    obj = step.objective;
    if (change <= opt.tol * std::max(1.0, std::abs(obj))) {
      res.converged = true;
      break;
    }
  }
  res.weights = compute_weights(X, res.theta, cfg.gamma);
  return res;
}

UnivariateFit univariate_gamma_fit(const std::vector<double>& x, double gamma, double tol, int max_iter) {
  if (x.size() < 2) throw DegenerateSample("univariate fit needs at least two observations");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  const double mad = kMadConstant * raw_mad(x);
  if (!(mad > 0.0)) throw DegenerateSample("median absolute deviation is zero");

  const auto n = static_cast<Index>(x.size());
  const Eigen::Map<const Vector> xv(x.data(), n);
  UnivariateFit f{median(x), mad * mad, 0};
  Vector lw(n);
  for (int it = 1; it <= max_iter; ++it) {
    for (Index i = 0; i < n; ++i) {
      const double d = xv(i) - f.mu;
      lw(i) = -0.5 * gamma * d * d / f.sigma2;
    }
    const Vector w = (lw.array() - log_sum_exp(lw)).exp();
    const double mu = w.dot(xv);
    const double s2 = (1.0 + gamma) * (w.array() * (xv.array() - mu).square()).sum();
    if (!(s2 > 0.0)) throw DegenerateSample("univariate variance collapsed to zero");
    const bool done = std::abs(mu - f.mu) <= tol * std::sqrt(f.sigma2) && std::abs(s2 - f.sigma2) <= tol * f.sigma2;
    f = UnivariateFit{mu, s2, it};
    if (done) break;
  }
  return f;
}

LambdaMax lambda_max(const Dataset& X, double gamma) {
  if (X.p() < 2) throw std::invalid_argument("lambda_max requires p >= 2");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  const Index p = X.p();
  Vector mu(p), prec(p);
  for (Index j = 0; j < p; ++j) {
    const UnivariateFit u = univariate_gamma_fit(column(X, j), gamma);
    mu(j) = u.mu;
    prec(j) = 1.0 / u.sigma2;
  }
  ModelParams theta{mu, SymMatrix::diagonal(prec)};

  // The per-variable fits do not share weights once γ > 0; iterate the
  // diagonal MM to the joint fixed point so λ₁ is exact for the joint problem.
  for (int it = 0; it < 100000; ++it) {
    const WeightVector w = compute_weights(X, theta, gamma);
    // the γ-likelihood is unbounded below at a point mass, and a large γ·p can
    // drive this iteration there
    if (w.w.maxCoeff() >= 1.0 - 1e-12) throw DegenerateScatter("weights collapsed onto a single observation");
    const Vector m = X.x.transpose() * w.w;
    Vector nprec(p);
    for (Index j = 0; j < p; ++j) {
      const double d = (w.w.array() * (X.x.col(j).array() - m(j)).square()).sum();
      if (!(d > 0.0)) throw DegenerateSample("weighted variance collapsed for column " + std::to_string(j));
      nprec(j) = 1.0 / ((1.0 + gamma) * d);
    }
    const double dmu = ((m - theta.mu).array().abs() * prec.array().sqrt()).maxCoeff();
    const double dprec = ((nprec - prec).array().abs() / prec.array()).maxCoeff();
    theta = ModelParams{m, SymMatrix::diagonal(nprec)};
    prec = nprec;
    if (dmu <= 1e-14 && dprec <= 1e-14) break;
  }

  LambdaMax out;
  out.weights = compute_weights(X, theta, gamma);
  const Vector m = X.x.transpose() * out.weights.w;
  out.lambda = offdiag_max_abs(weighted_scatter(X, m, out.weights)) * (1.0 + kLambdaMaxSlack);
  out.theta = std::move(theta);
  return out;
}

std::vector<double> lambda_grid(double lambda1, int K, double delta) {
  if (K < 2) throw std::invalid_argument("K must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(lambda1 > 0.0)) throw std::invalid_argument("lambda1 must be > 0");
  std::vector<double> grid(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) grid[static_cast<std::size_t>(k)] = lambda1 * std::pow(delta, double(k) / double(K - 1));
  grid.front() = lambda1;
  grid.back() = lambda1 * delta;
  return grid;
}

SolutionPath solution_path(const Dataset& X, double gamma, int K, double delta, const FitOptions& opt) {
  LambdaMax lm = lambda_max(X, gamma);
  SolutionPath path;
  path.gamma = gamma;
  path.lambda_max = lm.lambda;
  path.lambdas = lambda_grid(lm.lambda, K, delta);
  ModelParams current = lm.theta;
  for (double lam : path.lambdas) {
    const RobustConfig cfg{gamma, lam};
    try {
      FitResult f = fit(X, cfg, current, opt);
      current = f.theta;
      path.status.push_back(f.converged ? PathStatus::ok : PathStatus::not_converged);
      path.messages.emplace_back();
      path.fits.push_back(std::move(f));
    } catch (const Error& e) {
      FitResult f;
      f.theta = current;
      f.config = cfg;
      f.weights = compute_weights(X, current, gamma);
      path.status.push_back(PathStatus::failed);
      path.messages.emplace_back(e.what());
      path.fits.push_back(std::move(f));
    }
  }
  return path;
}

}  // namespace rggm
