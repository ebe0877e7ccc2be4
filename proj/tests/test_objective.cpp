#include <doctest.h>

#include "oracles.hpp"
#include "rggm/errors.hpp"
#include "rggm/objective.hpp"

using namespace rggm;

namespace {

const double kLn2Pi = std::log(2.0 * std::numbers::pi);

ModelParams standard(Index p) { return ModelParams{Vector::Zero(p), SymMatrix::identity(p)}; }

Matrix m22(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

/// Moves coordinate `idx` of [μ, vech Ω] by h (off-diagonals tied).
ModelParams perturbed(const ModelParams& t, Index idx, double h) {
  ModelParams out = t;
  const Index p = t.dim();
  if (idx < p) {
    out.mu(idx) += h;
    return out;
  }
  Index k = p;
  for (Index i = 0; i < p; ++i)
    for (Index j = i; j < p; ++j, ++k)
      if (k == idx) out.omega.set(i, j, t.omega(i, j) + h);
  return out;
}

ModelParams random_theta(Index p, std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  Vector mu(p);
  for (Index i = 0; i < p; ++i) mu(i) = nd(g);
  return ModelParams{mu, SymMatrix::symmetrized(oracle::random_spd(p, g, 0.5, 2.0))};
}

}  // namespace

TEST_CASE("log_density examples") {
  CHECK(log_density(Vector::Zero(1), standard(1)) == doctest::Approx(-0.5 * kLn2Pi).epsilon(1e-15));
  CHECK(log_density(Vector{{1.0, 0.0}}, standard(2)) == doctest::Approx(-kLn2Pi - 0.5).epsilon(1e-15));

  const ModelParams th{Vector{{1.0, 1.0}}, SymMatrix::from_dense(m22(2, 1, 1, 2))};
  CHECK(log_density(Vector::Zero(2), th) ==
        doctest::Approx(oracle::gauss_logpdf(Vector::Zero(2), th.mu, th.omega.dense())).epsilon(1e-14));
  // normalization by quadrature
  const double mass = oracle::trapezoid2(
      [&](double a, double b) { return std::exp(log_density(Vector{{a, b}}, th)); }, -7, 9, -7, 9, 400);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ell2 closed form against quadrature") {
  CHECK(ell2_closed_form(SymMatrix::from_dense(m22(2, 1, 1, 2)), 0.0) == 0.0);

  const double q1 = oracle::trapezoid(
      [](double x) { return std::exp(2.0 * oracle::gauss_logpdf(Vector{{x}}, Vector::Zero(1), Matrix::Ones(1, 1))); },
      -12, 12, 2400);
  const double l2 = ell2_closed_form(SymMatrix::identity(1), 1.0);
  CHECK(l2 == doctest::Approx(0.5 * std::log(q1)).epsilon(1e-8));
  CHECK(l2 == doctest::Approx(-0.25 * std::log(4.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(l2 == doctest::Approx(-0.6327561).epsilon(1e-7));

  const Matrix om = m22(2, 1, 1, 2);
  const double q2 = oracle::trapezoid2(
      [&](double a, double b) { return std::exp(1.5 * oracle::gauss_logpdf(Vector{{a, b}}, Vector::Zero(2), om)); },
      -8, 8, -8, 8, 400);
  CHECK(std::abs(ell2_closed_form(SymMatrix::from_dense(om), 0.5) - std::log(q2) / 1.5) < 1e-6);
}

TEST_CASE("neg_gamma_loglik examples") {
  Dataset x1(Matrix::Zero(1, 1));
  const double expect = 0.5 * kLn2Pi - 0.25 * std::log(4.0 * std::numbers::pi);
  CHECK(neg_gamma_loglik(x1, standard(1), 1.0) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(neg_gamma_loglik(x1, standard(1), 1.0) == doctest::Approx(0.2861825).epsilon(1e-6));
  CHECK_THROWS_AS(neg_gamma_loglik(Dataset(Matrix(0, 1)), standard(1), 1.0), EmptyDataset);

  std::mt19937_64 g(17);
  const Dataset X(oracle::random_normal(40, 3, g));
  const ModelParams th = random_theta(3, g);
  double nll = 0.0;
  for (Index i = 0; i < X.n(); ++i) nll -= oracle::gauss_logpdf(X.x.row(i).transpose(), th.mu, th.omega.dense());
  nll /= static_cast<double>(X.n());
  CHECK(neg_gamma_loglik(X, th, 0.0) == doctest::Approx(nll).epsilon(1e-13));
  CHECK(std::abs(neg_gamma_loglik(X, th, 1e-6) - nll) < 1e-4);

  // empirical-measure invariance: duplication and row permutation
  Matrix dup(80, 3);
  dup << X.x, X.x.colwise().reverse();
  for (double gam : {0.05, 0.5, 1.0}) {
    const double v = neg_gamma_loglik(X, th, gam);
    CHECK(neg_gamma_loglik(Dataset(dup), th, gam) == doctest::Approx(v).epsilon(1e-13));
    CHECK(neg_gamma_loglik(Dataset(Matrix(X.x.colwise().reverse())), th, gam) == doctest::Approx(v).epsilon(1e-13));
  }
}

TEST_CASE("log-domain evaluation survives far outliers") {
  Matrix x(3, 1);
  x << 0, 0, 1e5;
  const double v = neg_gamma_loglik(Dataset(x), standard(1), 0.5);
  CHECK(std::isfinite(v));
  Matrix x2(2, 1);
  x2 << 0, 0;
  // the outlier contributes e^{-γ·5e9}, so the value is that of two clean points
  // with the empirical mass 2/3
  CHECK(v == doctest::Approx(neg_gamma_loglik(Dataset(x2), standard(1), 0.5) + std::log(1.5) / 0.5).epsilon(1e-12));
}

TEST_CASE("penalized objective") {
  std::mt19937_64 g(2);
  const Dataset X(oracle::random_normal(30, 2, g));
  ModelParams th{Vector::Zero(2), SymMatrix::from_dense(m22(1, 0.3, 0.3, 1))};
  CHECK(penalized_gamma_objective(X, th, {0.1, 0.0}) == neg_gamma_loglik(X, th, 0.1));
  CHECK(penalized_gamma_objective(X, th, {0.1, 1.0}) - neg_gamma_loglik(X, th, 0.1) == doctest::Approx(0.3));
  const ModelParams diag{Vector::Zero(2), SymMatrix::diagonal(Vector{{2.0, 0.5}})};
  CHECK(penalized_gamma_objective(X, diag, {0.1, 7.0}) == neg_gamma_loglik(X, diag, 0.1));
  CHECK_THROWS_AS((RobustConfig{-0.1, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("density power divergence pieces") {
  const double q = oracle::trapezoid(
      [](double x) { return std::exp(2.0 * oracle::gauss_logpdf(Vector{{x}}, Vector::Zero(1), Matrix::Ones(1, 1))); },
      -12, 12, 2400);
  CHECK(q == doctest::Approx(1.0 / (2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-10));
  CHECK(2.0 * dp_b_beta(SymMatrix::identity(1), 1.0) == doctest::Approx(q).epsilon(1e-10));

  Dataset x1(Matrix::Zero(1, 1));
  const double first = dp_objective(x1, standard(1), 1.0, 0.0) - dp_b_beta(SymMatrix::identity(1), 1.0);
  CHECK(first == doctest::Approx(-1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(first == doctest::Approx(-0.398942).epsilon(1e-6));

  std::mt19937_64 g(9);
  const Dataset X(oracle::random_normal(20, 3, g));
  const ModelParams th = random_theta(3, g);
  const double pen_dp = dp_objective(X, th, 0.3, 0.7) - dp_objective(X, th, 0.3, 0.0);
  const double pen_g = penalized_gamma_objective(X, th, {0.3, 0.7}) - penalized_gamma_objective(X, th, {0.3, 0.0});
  CHECK(pen_dp == doctest::Approx(pen_g).epsilon(1e-10));
}

TEST_CASE("score matches central differences of log_density") {
  std::mt19937_64 g(23);
  std::normal_distribution<double> nd;
  const double h = 1e-6;
  for (int t = 0; t < 100; ++t) {
    const Index p = 1 + t % 4;
    const ModelParams th = random_theta(p, g);
    Vector x(p);
    for (Index i = 0; i < p; ++i) x(i) = 2.0 * nd(g);
    const Vector s = score(x, th);
    REQUIRE(s.size() == param_size(p));
    for (Index k = 0; k < s.size(); ++k) {
      const double fd =
          (log_density(x, perturbed(th, k, h)) - log_density(x, perturbed(th, k, -h))) / (2.0 * h);
      REQUIRE(std::abs(fd - s(k)) < 1e-5);
    }
  }
}

TEST_CASE("kernels: composition and limits") {
  std::mt19937_64 g(4);
  const double h = 1e-6;
  const ModelParams th = random_theta(3, g);
  const double gam = 0.3;
  KernelInput ki{default_subgradient(th), RobustConfig{gam, 0.2}};
  CHECK(default_subgradient(th).head(3).isZero());

  const Vector x{{0.3, -0.2, 0.5}};
  Vector d_ell2(param_size(3)), d_b(param_size(3));
  for (Index k = 0; k < d_ell2.size(); ++k) {
    d_ell2(k) = (ell2_closed_form(perturbed(th, k, h).omega, gam) - ell2_closed_form(perturbed(th, k, -h).omega, gam)) /
                (2 * h);
    d_b(k) = (dp_b_beta(perturbed(th, k, h).omega, gam) - dp_b_beta(perturbed(th, k, -h).omega, gam)) / (2 * h);
  }
  const double fg = std::exp(gam * oracle::gauss_logpdf(x, th.mu, th.omega.dense()));
  const Vector psi_g = fg * (score(x, th) - d_ell2 - 0.1 * ki.subgrad_u);
  const Vector psi_dp = -fg * score(x, th) + d_b + 0.1 * ki.subgrad_u;
  CHECK((kernel(x, th, ki, KernelMethod::gamma) - psi_g).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((kernel(x, th, ki, KernelMethod::dp) - psi_dp).cwiseAbs().maxCoeff() < 1e-7);

  // along a ray: γ-kernel vanishes, dp-kernel approaches |∂b_β/∂θ|
  KernelInput k0{Vector::Zero(param_size(3)), RobustConfig{0.1, 0.0}};
  const ModelParams st = standard(3);
  const Vector ones = Vector::Ones(3);
  CHECK(kernel_norm(100.0 * ones, st, k0, KernelMethod::gamma) <
        1e-8 * kernel_norm(2.0 * ones, st, k0, KernelMethod::gamma));
  Vector db0(param_size(3));
  for (Index k = 0; k < db0.size(); ++k)
    db0(k) = (dp_b_beta(perturbed(st, k, h).omega, 0.1) - dp_b_beta(perturbed(st, k, -h).omega, 0.1)) / (2 * h);
  CHECK(std::abs(kernel_norm(100.0 * ones, st, k0, KernelMethod::dp) - db0.norm()) <= 0.1 * db0.norm());
}
