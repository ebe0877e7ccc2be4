// rggm: robust sparse Gaussian graphical models from the command line.

#include <CLI11.hpp>
#include <iostream>

#include "rggm/app.hpp"

using namespace rggm;

namespace {

void add_estimator_flags(CLI::App* c, app::EstimatorParams& e, std::string& estimator) {
  c->add_option("--estimator", estimator, "gamma | glasso | tlasso | npn")->capture_default_str();
  c->add_option("--gamma", e.gamma, "gamma-likelihood power, >= 0")->capture_default_str();
  c->add_option("--nu", e.nu, "t-lasso degrees of freedom")->capture_default_str();
  c->add_option("--delta-n", e.delta_n, "nonparanormal truncation (default: automatic)");
  c->add_flag("--npn-correlation", e.npn_correlation, "feed the correlation matrix to the graphical lasso");
  c->add_option("--tol", e.tol, "outer relative tolerance")->capture_default_str();
  c->add_option("--max-iter", e.max_iter, "outer iteration cap")->capture_default_str();
  c->add_option("--inner-tol", e.inner_tol, "graphical-lasso tolerance")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Robust sparse Gaussian graphical model estimation"};
  cli.require_subcommand(1);
  cli.fallthrough();
  bool quiet = false;
  cli.add_flag("--quiet", quiet, "suppress progress messages");

  app::FitArgs fit;
  std::string fit_est = "gamma", fit_norm = "none", grid;
  auto* cf = cli.add_subcommand("fit", "fit one estimator to a CSV dataset");
  cf->add_option("--input", fit.input, "CSV file, rows are observations")->required();
  cf->add_option("--out", fit.out_dir, "output directory")->capture_default_str();
  add_estimator_flags(cf, fit.est, fit_est);
  auto* lam = cf->add_option("--lambda", fit.lambda, "single penalty value");
  cf->add_option("--lambda-grid", grid, "'default' for the geometric grid from lambda_max")->excludes(lam);
  cf->add_option("--K", fit.K, "grid size")->capture_default_str();
  cf->add_option("--delta", fit.delta, "ratio of smallest to largest grid value")->capture_default_str();
  cf->add_option("--normalize", fit_norm, "none | sd | mad")->capture_default_str();
  cf->add_option("--seed", fit.seed, "recorded in the config echo")->capture_default_str();

  app::SimulateArgs sim;
  std::string sim_model = "ii";
  auto* cs = cli.add_subcommand("simulate", "draw a contaminated sample from a scale-free graph");
  cs->add_option("--p", sim.spec.p)->capture_default_str();
  cs->add_option("--n", sim.spec.n)->capture_default_str();
  cs->add_option("--model", sim_model, "i | ii | iii")->capture_default_str();
  cs->add_option("--epsilon", sim.spec.epsilon)->capture_default_str();
  cs->add_option("--eta", sim.spec.eta)->capture_default_str();
  cs->add_option("--m", sim.spec.ba_edges_per_node, "edges per new node")->capture_default_str();
  cs->add_option("--seed", sim.spec.seed)->capture_default_str();
  cs->add_option("--out", sim.out_dir, "output directory")->capture_default_str();

  app::EvaluateArgs ev;
  auto* ce = cli.add_subcommand("evaluate", "score fit.json against truth.json or another fit");
  ce->add_option("--fit", ev.fit)->required();
  ce->add_option("--truth", ev.truth);
  ce->add_option("--compare", ev.compare, "second fit.json for agreement metrics");
  ce->add_option("--out", ev.out_dir, "output directory")->capture_default_str();

  app::BenchArgs bench;
  bench.est.gamma = 0.05;
  std::string bench_model = "ii", bench_est = "gamma,glasso,tlasso,npn";
  auto* cb = cli.add_subcommand("bench", "replicated simulate, fit and evaluate");
  cb->add_option("--p", bench.spec.p)->capture_default_str();
  cb->add_option("--n", bench.spec.n)->capture_default_str();
  cb->add_option("--model", bench_model, "i | ii | iii")->capture_default_str();
  cb->add_option("--epsilon", bench.spec.epsilon)->capture_default_str();
  cb->add_option("--eta", bench.spec.eta)->capture_default_str();
  cb->add_option("--m", bench.spec.ba_edges_per_node)->capture_default_str();
  cb->add_option("--seed", bench.spec.seed)->capture_default_str();
  cb->add_option("--replicates", bench.replicates)->capture_default_str();
  cb->add_option("--estimators", bench_est, "comma-separated list")->capture_default_str();
  cb->add_option("--gamma", bench.est.gamma)->capture_default_str();
  cb->add_option("--nu", bench.est.nu)->capture_default_str();
  cb->add_option("--delta-n", bench.est.delta_n);
  cb->add_option("--K", bench.K)->capture_default_str();
  cb->add_option("--delta", bench.delta)->capture_default_str();
  cb->add_option("--out", bench.out_dir, "output directory")->capture_default_str();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "rggm: " << e.what() << '\n';
    return app::kExitInput;
  }

  try {
    if (*cf) {
      if (!grid.empty() && grid != "default") throw InputError("--lambda-grid accepts only 'default'");
      fit.est.estimator = app::parse_estimator(fit_est);
      fit.normalize = app::parse_normalize(fit_norm);
      return app::run_fit(fit, std::cerr);
    }
    if (*cs) {
      sim.spec.model = app::parse_model(sim_model);
      return app::run_simulate(sim, std::cerr);
    }
    if (*ce) return app::run_evaluate(ev, std::cerr);
    if (*cb) {
      bench.spec.model = app::parse_model(bench_model);
      bench.quiet = quiet;
      bench.estimators.clear();
      std::stringstream ss(bench_est);
      for (std::string tok; std::getline(ss, tok, ',');) bench.estimators.push_back(app::parse_estimator(tok));
      return app::run_bench(bench, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "rggm: " << e.what() << '\n';
    return app::kExitInput;
  }
  return app::kExitInput;
}
