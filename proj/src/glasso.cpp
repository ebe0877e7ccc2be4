#include "rggm/glasso.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rggm::glasso {

namespace {

double mean_abs_offdiag(const SymMatrix& s) {
  const Index p = s.dim();
  if (p < 2) return 0.0;
  return offdiag_l1(s) / static_cast<double>(p * (p - 1));
}

constexpr int kMaxLassoPasses = 10000;

}  // namespace

MaxSweepsExceeded::MaxSweepsExceeded(SymMatrix last, double residual, int sweeps)
    : Error("graphical lasso did not converge after " + std::to_string(sweeps) +
            " sweeps (kkt residual " + std::to_string(residual) + ")"),
      last_(std::move(last)),
      residual_(residual),
      sweeps_(sweeps) {}

void Problem::validate() const {
  for (Index j = 0; j < s.dim(); ++j)
    if (!(s(j, j) > 0.0) || !std::isfinite(s(j, j))) throw NonPositiveDiagonal(static_cast<int>(j));
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
  if (!(logdet_scale > 0.0) || !std::isfinite(logdet_scale))
    throw std::invalid_argument("logdet_scale must be finite and > 0");
}

Problem reduce_to_standard(const Problem& p) {
  if (p.logdet_scale == 1.0) return p;
  const double a = 1.0 / p.logdet_scale;
  return Problem{p.s.scaled(a), p.lambda * a, 1.0};
}

double objective(const SymMatrix& omega, const Problem& p) {
  if (omega.dim() != p.s.dim()) throw DimensionMismatch("objective: dimension mismatch");
  const SpdFactor f = spd_factorize(omega);
  const double tr = (omega.dense().cwiseProduct(p.s.dense())).sum();
  return -p.logdet_scale * f.log_det() + tr + p.lambda * offdiag_l1(omega);
}

double kkt_residual(const SymMatrix& omega, const Problem& problem) {
  const Problem p = reduce_to_standard(problem);
  if (omega.dim() != p.s.dim()) throw DimensionMismatch("kkt_residual: dimension mismatch");
  const Index dim = omega.dim();
  const SpdFactor factor = spd_factorize(omega);
  // diagonal Ω inverts exactly; the Cholesky round trip would leave ulp noise
  const SymMatrix sigma =
      offdiag_max_abs(omega) == 0.0 ? SymMatrix::diagonal(omega.diag().cwiseInverse()) : factor.inverse();
  double worst = 0.0;
  for (Index j = 0; j < dim; ++j) {
    worst = std::max(worst, std::abs(p.s(j, j) - sigma(j, j)));
    for (Index k = j + 1; k < dim; ++k) {
      const double g = p.s(j, k) - sigma(j, k);
      const double w = omega(j, k);
      double r;
      if (w != 0.0)
        r = std::abs(g + p.lambda * (w > 0.0 ? 1.0 : -1.0));
      else
        r = std::max(0.0, std::abs(g) - p.lambda);
      worst = std::max(worst, r);
    }
  }
  return worst;
}

Solution solve(const Problem& problem, const std::optional<SymMatrix>& init, const Options& opt) {
  problem.validate();
  const Problem std_problem = reduce_to_standard(problem);
  const SymMatrix& S = std_problem.s;
  const double lambda = std_problem.lambda;
  const Index p = S.dim();

  Matrix omega(p, p);
  if (init) {
    if (init->dim() != p) throw DimensionMismatch("warm start has the wrong dimension");
    (void)spd_factorize(*init);
    omega = init->dense();
  } else {
    omega.setZero();
    for (Index j = 0; j < p; ++j) omega(j, j) = 1.0 / (S(j, j) + lambda);
  }
  Matrix sigma = spd_factorize(SymMatrix::from_dense(omega)).inverse().dense();

  Solution sol;
  sol.objective_trace.push_back(objective(SymMatrix::from_dense(omega), std_problem));

  double scale = mean_abs_offdiag(S);
  if (scale == 0.0) scale = S.diag().mean();
  const double threshold = opt.tol * scale;

  const Index q = p - 1;
  std::vector<Index> idx(static_cast<std::size_t>(q));
  Matrix a(q, q);
  Vector s12(q), beta(q), g(q), sig12(q);
  double kkt = std::numeric_limits<double>::infinity();

  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    const Matrix sigma_before = sigma;
    for (Index j = 0; j < p; ++j) {
      const double s22 = S(j, j);
      if (q == 0) {
        omega(j, j) = 1.0 / s22;
        sigma(j, j) = s22;
        continue;
      }
      for (Index k = 0, t = 0; k < p; ++k)
        if (k != j) idx[static_cast<std::size_t>(t++)] = k;
      // A = (Ω₁₁)⁻¹ = Σ₁₁ − σ₁₂σ₁₂ᵀ/σ₂₂
      const double sig22 = sigma(j, j);
      for (Index t = 0; t < q; ++t) {
        const Index kt = idx[static_cast<std::size_t>(t)];
        sig12(t) = sigma(kt, j);
        s12(t) = S(kt, j);
        beta(t) = omega(kt, j);
      }
      for (Index c = 0; c < q; ++c) {
        const Index kc = idx[static_cast<std::size_t>(c)];
        for (Index r = c; r < q; ++r) {
          const Index kr = idx[static_cast<std::size_t>(r)];
          const double v = sigma(kr, kc) - sig12(r) * sig12(c) / sig22;
          a(r, c) = v;
          a(c, r) = v;
        }
      }
      g.noalias() = a * beta;

      // lasso in β = ω₁₂:  s₁₂ᵀβ + ½·s₂₂·βᵀAβ + λ‖β‖₁
      const double coord_tol = 1e-2 * opt.tol * scale;
      for (int pass = 0; pass < kMaxLassoPasses; ++pass) {
        double worst = 0.0;
        for (Index k = 0; k < q; ++k) {
          const double akk = a(k, k);
          const double r = s12(k) + s22 * (g(k) - akk * beta(k));
          const double next = -soft_threshold(r, lambda) / (s22 * akk);
          const double delta = next - beta(k);
          if (delta != 0.0) {
            g.noalias() += delta * a.col(k);
            beta(k) = next;
            worst = std::max(worst, std::abs(delta) * s22 * akk);
          }
        }
        if (worst <= coord_tol) break;
      }

      // Exact block update; the Schur complement ω₂₂ − βᵀAβ equals 1/s₂₂ > 0.
      g.noalias() = a * beta;
      for (Index t = 0; t < q; ++t) {
        const Index kt = idx[static_cast<std::size_t>(t)];
        omega(kt, j) = beta(t);
        omega(j, kt) = beta(t);
      }
      omega(j, j) = 1.0 / s22 + beta.dot(g);
      sigma(j, j) = s22;
      for (Index t = 0; t < q; ++t) {
        const Index kt = idx[static_cast<std::size_t>(t)];
        sigma(kt, j) = -s22 * g(t);
        sigma(j, kt) = sigma(kt, j);
      }
      for (Index c = 0; c < q; ++c) {
        const Index kc = idx[static_cast<std::size_t>(c)];
        for (Index r = c; r < q; ++r) {
          const Index kr = idx[static_cast<std::size_t>(r)];
          const double v = a(r, c) + s22 * g(r) * g(c);
          sigma(kr, kc) = v;
          sigma(kc, kr) = v;
        }
      }
    }

    // Refresh Σ to stop drift; this also certifies Ω is PD after the sweep.
    const SymMatrix omega_sym = SymMatrix::from_dense(omega);
    const SpdFactor f = spd_factorize(omega_sym);
    sigma = f.inverse().dense();
    const double tr = (omega.cwiseProduct(S.dense())).sum();
    sol.objective_trace.push_back(-f.log_det() + tr + lambda * offdiag_l1(omega_sym));

    const double change = (sigma - sigma_before).cwiseAbs().mean();
    sol.iterations = sweep;
    if (change <= threshold) {
      kkt = kkt_residual(omega_sym, std_problem);
      if (kkt <= 10.0 * opt.tol) {
        sol.omega = omega_sym;
        sol.sigma = SymMatrix::from_dense(sigma);
        sol.kkt_residual = kkt;
        return sol;
      }
    }
  }
  const SymMatrix last = SymMatrix::from_dense(omega);
  throw MaxSweepsExceeded(last, kkt_residual(last, std_problem), opt.max_sweeps);
}

}  // namespace rggm::glasso
