#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rggm/app.hpp"
#include "rggm/baselines.hpp"
#include "rggm/errors.hpp"
#include "rggm/eval.hpp"
#include "rggm/gamma_mm.hpp"
#include "rggm/glasso.hpp"
#include "rggm/objective.hpp"
#include "rggm/simgen.hpp"

namespace py = pybind11;
using namespace rggm;

namespace {

using Pairs = std::vector<std::pair<Index, Index>>;

SymMatrix sym(const Matrix& m) { return SymMatrix::from_dense(m); }

/// Edges cross the boundary as 0-based (i, j) pairs with i < j.
EdgeSet edges_in(const Pairs& pairs, Index p) {
  EdgeSet e(p);
  for (const auto& [i, j] : pairs) e.add(std::min(i, j), std::max(i, j));
  return e;
}

Pairs edges_out(const EdgeSet& e) { return {e.edges.begin(), e.edges.end()}; }

std::optional<ModelParams> init_from(const std::optional<Vector>& mu, const std::optional<Matrix>& omega) {
  if (!mu && !omega) return std::nullopt;
  if (!mu || !omega) throw InputError("init needs both mu and omega");
  return ModelParams{*mu, sym(*omega)};
}

const char* status_name(PathStatus s) {
  switch (s) {
    case PathStatus::ok:
      return "ok";
    case PathStatus::not_converged:
      return "not_converged";
    case PathStatus::failed:
      return "failed";
  }
  return "?";
}

template <class E>
void add_error(py::module_& m, const char* name, py::handle base) {
  py::register_exception<E>(m, name, base);
}

}  // namespace

PYBIND11_MODULE(_rggm, m) {
  m.doc() = "Robust sparse Gaussian graphical models (gamma-lasso) and baselines";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  add_error<NotPositiveDefinite>(m, "NotPositiveDefinite", base);
  add_error<DimensionMismatch>(m, "DimensionMismatch", base);
  add_error<NotSymmetric>(m, "NotSymmetric", base);
  add_error<EmptyDataset>(m, "EmptyDataset", base);
  add_error<NonPositiveDiagonal>(m, "NonPositiveDiagonal", base);
  add_error<DegenerateScatter>(m, "DegenerateScatter", base);
  add_error<DegenerateSample>(m, "DegenerateSample", base);
  add_error<DegenerateColumn>(m, "DegenerateColumn", base);
  add_error<SupportCollision>(m, "SupportCollision", base);
  add_error<EmptyTruth>(m, "EmptyTruth", base);
  add_error<InputError>(m, "InputError", base);
  add_error<glasso::MaxSweepsExceeded>(m, "MaxSweepsExceeded", base);

  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("mu", [](const FitResult& f) { return f.theta.mu; })
      .def_property_readonly("omega", [](const FitResult& f) { return f.theta.omega.dense(); })
      .def_property_readonly("weights", [](const FitResult& f) { return f.weights.w; })
      .def_readonly("objective_trace", &FitResult::objective_trace)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("mm_iterations", &FitResult::mm_iterations)
      .def_readonly("inner_kkt_max", &FitResult::inner_kkt_max)
      .def_property_readonly("gamma", [](const FitResult& f) { return f.config.gamma; })
      .def_property_readonly("lam", [](const FitResult& f) { return f.config.lambda; })
      .def("edges", [](const FitResult& f, double tol) { return edges_out(edge_set(f.theta.omega, tol)); },
           py::arg("zero_tol") = 1e-8)
      .def("__repr__", [](const FitResult& f) {
        return "<FitResult p=" + std::to_string(f.theta.dim()) + " lam=" + std::to_string(f.config.lambda) +
               (f.converged ? " converged>" : " not converged>");
      });

  py::class_<SolutionPath>(m, "SolutionPath")
      .def_readonly("lambdas", &SolutionPath::lambdas)
      .def_readonly("fits", &SolutionPath::fits)
      .def_readonly("messages", &SolutionPath::messages)
      .def_readonly("gamma", &SolutionPath::gamma)
      .def_readonly("lambda_max", &SolutionPath::lambda_max)
      .def_property_readonly("status",
                             [](const SolutionPath& p) {
                               std::vector<std::string> s;
                               for (auto x : p.status) s.emplace_back(status_name(x));
                               return s;
                             })
      .def("__len__", [](const SolutionPath& p) { return p.fits.size(); });

  // γ-lasso
  m.def(
      "fit",
      [](const Matrix& x, double gamma, double lam, std::optional<Vector> init_mu, std::optional<Matrix> init_omega,
         double tol, int max_iter, double inner_tol, int inner_max_sweeps) {
        FitOptions opt{tol, max_iter, {inner_tol, inner_max_sweeps}, {}};
        py::gil_scoped_release nogil;
        return fit(Dataset(x), RobustConfig{gamma, lam}, init_from(init_mu, init_omega), opt);
      },
      py::arg("x"), py::arg("gamma"), py::arg("lam"), py::arg("init_mu") = py::none(),
      py::arg("init_omega") = py::none(), py::arg("tol") = 1e-7, py::arg("max_iter") = 200,
      py::arg("inner_tol") = 1e-8, py::arg("inner_max_sweeps") = 500,
      "MM fit of the penalized gamma-likelihood at one lambda.");
  m.def(
      "solution_path",
      [](const Matrix& x, double gamma, int K, double delta, double tol, int max_iter, double inner_tol) {
        FitOptions opt{tol, max_iter, {inner_tol, 500}, {}};
        py::gil_scoped_release nogil;
        return solution_path(Dataset(x), gamma, K, delta, opt);
      },
      py::arg("x"), py::arg("gamma"), py::arg("K") = 10, py::arg("delta") = 0.2, py::arg("tol") = 1e-7,
      py::arg("max_iter") = 200, py::arg("inner_tol") = 1e-8);
  m.def(
      "lambda_max", [](const Matrix& x, double gamma) { return lambda_max(Dataset(x), gamma).lambda; },
      py::arg("x"), py::arg("gamma"), "Smallest lambda with a diagonal gamma-lasso estimate.");
  m.def("lambda_grid", &lambda_grid, py::arg("lambda1"), py::arg("K") = 10, py::arg("delta") = 0.2);
  m.def(
      "weights", [](const Matrix& x, const Vector& mu, const Matrix& omega,
                    double gamma) { return compute_weights(Dataset(x), ModelParams{mu, sym(omega)}, gamma).w; },
      py::arg("x"), py::arg("mu"), py::arg("omega"), py::arg("gamma"));
  m.def(
      "neg_gamma_loglik",
      [](const Matrix& x, const Vector& mu, const Matrix& omega, double gamma) {
        return neg_gamma_loglik(Dataset(x), ModelParams{mu, sym(omega)}, gamma);
      },
      py::arg("x"), py::arg("mu"), py::arg("omega"), py::arg("gamma"));
  m.def(
      "ell2", [](const Matrix& omega, double gamma) { return ell2_closed_form(sym(omega), gamma); },
      py::arg("omega"), py::arg("gamma"));
  m.def(
      "univariate_fit",
      [](const std::vector<double>& x, double gamma) {
        const UnivariateFit u = univariate_gamma_fit(x, gamma);
        return std::make_pair(u.mu, u.sigma2);
      },
      py::arg("x"), py::arg("gamma"), "(mu, sigma2) of the univariate gamma-estimator.");

  // graphical lasso
  m.def(
      "glasso_solve",
      [](const Matrix& s, double lam, double tol, int max_sweeps) {
        glasso::Problem p{sym(s), lam, 1.0};
        glasso::Solution sol;
        {
          py::gil_scoped_release nogil;
          sol = glasso::solve(p, std::nullopt, {tol, max_sweeps});
        }
        return py::make_tuple(sol.omega.dense(), sol.sigma.dense(), sol.iterations, sol.kkt_residual);
      },
      py::arg("s"), py::arg("lam"), py::arg("tol") = 1e-6, py::arg("max_sweeps") = 500,
      "Returns (omega, sigma, sweeps, kkt_residual).");
  m.def(
      "glasso_kkt", [](const Matrix& omega, const Matrix& s,
                       double lam) { return glasso::kkt_residual(sym(omega), glasso::Problem{sym(s), lam, 1.0}); },
      py::arg("omega"), py::arg("s"), py::arg("lam"));
  m.def(
      "fit_glasso", [](const Matrix& x, double lam) { return fit_glasso(Dataset(x), lam); }, py::arg("x"),
      py::arg("lam"));
  m.def(
      "glasso_path", [](const Matrix& x, int K, double delta) { return glasso_path(Dataset(x), K, delta); },
      py::arg("x"), py::arg("K") = 10, py::arg("delta") = 0.2);
  m.def(
      "sample_covariance", [](const Matrix& x) { return sample_covariance(Dataset(x)).dense(); }, py::arg("x"));

  // baselines
  m.def(
      "fit_tlasso",
      [](const Matrix& x, double lam, double nu) {
        TlassoConfig c;
        c.nu = nu;
        c.lambda = lam;
        return fit_tlasso(Dataset(x), c);
      },
      py::arg("x"), py::arg("lam"), py::arg("nu") = 1.0);
  m.def(
      "tlasso_path",
      [](const Matrix& x, double nu, int K, double delta) {
        TlassoConfig c;
        c.nu = nu;
        py::gil_scoped_release nogil;
        return tlasso_path(Dataset(x), c, K, delta);
      },
      py::arg("x"), py::arg("nu") = 1.0, py::arg("K") = 10, py::arg("delta") = 0.2);
  m.def(
      "npn_transform",
      [](const Matrix& x, std::optional<double> delta_n) {
        NpnConfig c;
        c.delta_n = delta_n;
        return npn_transform(Dataset(x), c).x;
      },
      py::arg("x"), py::arg("delta_n") = py::none());
  m.def(
      "npn_path",
      [](const Matrix& x, int K, double delta, bool use_correlation) {
        NpnConfig c;
        c.use_correlation = use_correlation;
        return npn_path(Dataset(x), c, K, delta);
      },
      py::arg("x"), py::arg("K") = 10, py::arg("delta") = 0.2, py::arg("use_correlation") = false);
  m.def("npn_delta", &npn_delta, py::arg("n"));
  m.def("normal_quantile", &normal_quantile, py::arg("prob"));

  // simulation
  m.def(
      "simulate",
      [](Index p, Index n, const std::string& model, double epsilon, double eta, int ba_m, std::uint64_t seed,
         std::uint64_t replicate) {
        SimSpec s;
        s.p = p;
        s.n = n;
        s.model = app::parse_model(model);
        s.epsilon = epsilon;
        s.eta = eta;
        s.ba_edges_per_node = ba_m;
        s.seed = seed;
        s.validate();
        const Simulation sim = simulate(s, replicate);
        py::dict out;
        out["x"] = sim.sample.data.x;
        out["omega"] = sim.truth.omega.dense();
        out["edges"] = edges_out(sim.truth.adjacency);
        out["labels"] = sim.sample.labels;
        return out;
      },
      py::arg("p") = 25, py::arg("n") = 200, py::arg("model") = "ii", py::arg("epsilon") = 0.1,
      py::arg("eta") = 5.0, py::arg("ba_m") = 1, py::arg("seed") = 1, py::arg("replicate") = 0,
      "Contaminated sample from a scale-free precision model: dict with x, omega, edges, labels.");

  // evaluation
  m.def(
      "edge_set", [](const Matrix& omega, double tol) { return edges_out(edge_set(sym(omega), tol)); },
      py::arg("omega"), py::arg("zero_tol") = 1e-8);
  m.def(
      "roc_point",
      [](const Pairs& est, const Pairs& truth, Index p) {
        const RocPoint r = roc_point(edges_in(est, p), edges_in(truth, p));
        return std::make_pair(r.nnz, r.tpr);
      },
      py::arg("estimated"), py::arg("truth"), py::arg("p"), "(nnz, tpr); nnz counts both triangles.");
  m.def(
      "mse_offdiag", [](const Matrix& est, const Matrix& truth) { return mse_offdiag(sym(est), sym(truth)); },
      py::arg("est"), py::arg("truth"));
  m.def(
      "total_agreement",
      [](const Pairs& a, const Pairs& b, Index p) { return total_agreement(edges_in(a, p), edges_in(b, p)); },
      py::arg("a"), py::arg("b"), py::arg("p"));
  m.def(
      "common_edges",
      [](const Pairs& a, const Pairs& b, Index p) { return common_edges(edges_in(a, p), edges_in(b, p)); },
      py::arg("a"), py::arg("b"), py::arg("p"));
  m.def(
      "f1_score",
      [](const Pairs& est, const Pairs& truth, Index p) { return f1_score(edges_in(est, p), edges_in(truth, p)); },
      py::arg("estimated"), py::arg("truth"), py::arg("p"));
}
