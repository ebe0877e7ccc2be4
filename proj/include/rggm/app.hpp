#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rggm/baselines.hpp"
#include "rggm/io.hpp"
#include "rggm/simgen.hpp"

namespace rggm::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitSoft = 2;

enum class Estimator { gamma, glasso, tlasso, npn };

Estimator parse_estimator(const std::string& s);
std::string to_string(Estimator e);
NormalizeMethod parse_normalize(const std::string& s);
std::string to_string(NormalizeMethod m);
ContaminationModel parse_model(const std::string& s);
std::string to_string(ContaminationModel m);

struct EstimatorParams {
  Estimator estimator = Estimator::gamma;
  double gamma = 0.1;
  double nu = 1.0;
  std::optional<double> delta_n;
  bool npn_correlation = false;
  double tol = 1e-7;
  int max_iter = 200;
  double inner_tol = 1e-8;
  int inner_max_sweeps = 500;
};

/// Fits `est` on X: a single λ when given, otherwise the default grid.
SolutionPath estimate(const Dataset& X, const EstimatorParams& est, std::optional<double> lambda, int K,
                      double delta);

struct FitArgs {
  std::string input;
  std::string out_dir = ".";
  EstimatorParams est;
  /// Empty means a grid of K points.
  std::optional<double> lambda;
  int K = 10;
  double delta = 0.2;
  NormalizeMethod normalize = NormalizeMethod::none;
  std::uint64_t seed = 0;
};

struct SimulateArgs {
  SimSpec spec;
  std::string out_dir = ".";
};

struct EvaluateArgs {
  std::string fit;
  std::optional<std::string> truth;
  std::optional<std::string> compare;
  std::string out_dir = ".";
};

struct BenchArgs {
  SimSpec spec;
  int replicates = 20;
  std::vector<Estimator> estimators{Estimator::gamma, Estimator::glasso, Estimator::tlasso, Estimator::npn};
  EstimatorParams est;
  int K = 10;
  double delta = 0.2;
  std::string out_dir = ".";
  bool quiet = false;
  /// 0 means RGGM_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

/// Each returns a process exit code; diagnostics go to `err`, one line each.
int run_fit(const FitArgs& args, std::ostream& err);
int run_simulate(const SimulateArgs& args, std::ostream& err);
int run_evaluate(const EvaluateArgs& args, std::ostream& err);
int run_bench(const BenchArgs& args, std::ostream& err);

io::Json fit_to_json(const FitResult& f, const EdgeSet& edges);

}  // namespace rggm::app
