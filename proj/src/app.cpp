#include "rggm/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rggm::app {

namespace fs = std::filesystem;
using io::Json;

Estimator parse_estimator(const std::string& s) {
  if (s == "gamma") return Estimator::gamma;
  if (s == "glasso") return Estimator::glasso;
  if (s == "tlasso") return Estimator::tlasso;
  if (s == "npn") return Estimator::npn;
  throw InputError("unknown estimator '" + s + "'");
}

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::gamma: return "gamma";
    case Estimator::glasso: return "glasso";
    case Estimator::tlasso: return "tlasso";
    case Estimator::npn: return "npn";
  }
  return "?";
}

NormalizeMethod parse_normalize(const std::string& s) {
  if (s == "none") return NormalizeMethod::none;
  if (s == "sd") return NormalizeMethod::sd;
  if (s == "mad") return NormalizeMethod::mad;
  throw InputError("unknown normalization '" + s + "'");
}

std::string to_string(NormalizeMethod m) {
  switch (m) {
    case NormalizeMethod::none: return "none";
    case NormalizeMethod::sd: return "sd";
    case NormalizeMethod::mad: return "mad";
  }
  return "?";
}

ContaminationModel parse_model(const std::string& s) {
  if (s == "i") return ContaminationModel::i;
  if (s == "ii") return ContaminationModel::ii;
  if (s == "iii") return ContaminationModel::iii;
  throw InputError("unknown contamination model '" + s + "'");
}

std::string to_string(ContaminationModel m) {
  switch (m) {
    case ContaminationModel::i: return "i";
    case ContaminationModel::ii: return "ii";
    case ContaminationModel::iii: return "iii";
  }
  return "?";
}

namespace {

std::string status_name(PathStatus s) {
  switch (s) {
    case PathStatus::ok: return "ok";
    case PathStatus::not_converged: return "not_converged";
    case PathStatus::failed: return "failed";
  }
  return "?";
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json estimator_json(const EstimatorParams& e) {
  Json j;
  j["estimator"] = to_string(e.estimator);
  if (e.estimator == Estimator::gamma) j["gamma"] = e.gamma;
  if (e.estimator == Estimator::tlasso) j["nu"] = e.nu;
  if (e.estimator == Estimator::npn) {
    j["delta_n"] = e.delta_n ? Json(*e.delta_n) : Json("auto");
    j["npn_correlation"] = e.npn_correlation;
  }
  j["tol"] = e.tol;
  j["max_iter"] = e.max_iter;
  j["inner_tol"] = e.inner_tol;
  j["inner_max_sweeps"] = e.inner_max_sweeps;
  return j;
}

Json spec_json(const SimSpec& s) {
  Json j;
  j["p"] = s.p;
  j["n"] = s.n;
  j["model"] = to_string(s.model);
  j["epsilon"] = s.epsilon;
  j["eta"] = s.eta;
  j["m"] = s.ba_edges_per_node;
  j["seed"] = s.seed;
  return j;
}

SolutionPath single_point(const Dataset& X, double lambda, const std::function<FitResult()>& run) {
  SolutionPath path;
  path.lambdas = {lambda};
  try {
    FitResult f = run();
    path.status.push_back(f.converged ? PathStatus::ok : PathStatus::not_converged);
    path.messages.emplace_back();
    path.fits.push_back(std::move(f));
  } catch (const glasso::MaxSweepsExceeded& e) {
    FitResult f;
    f.theta = ModelParams{X.x.colwise().mean().transpose(), e.last_iterate()};
    f.config = RobustConfig{0.0, lambda};
    f.weights = WeightVector{Vector::Constant(X.n(), 1.0 / static_cast<double>(X.n()))};
    path.status.push_back(PathStatus::failed);
    path.messages.emplace_back(e.what());
    path.fits.push_back(std::move(f));
  }
  return path;
}

bool all_ok(const SolutionPath& p) {
  return std::all_of(p.status.begin(), p.status.end(), [](PathStatus s) { return s == PathStatus::ok; });
}

std::string first_message(const SolutionPath& p) {
  for (std::size_t k = 0; k < p.status.size(); ++k)
    if (p.status[k] != PathStatus::ok)
      return "lambda index " + std::to_string(k) + ": " +
             (p.messages[k].empty() ? status_name(p.status[k]) : p.messages[k]);
  return {};
}

void ensure_dir(const std::string& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw InputError("cannot create output directory " + d + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

}  // namespace

SolutionPath estimate(const Dataset& X, const EstimatorParams& est, std::optional<double> lambda, int K,
                      double delta) {
  const glasso::Options inner{est.inner_tol, est.inner_max_sweeps};
  switch (est.estimator) {
    case Estimator::gamma: {
      FitOptions opt;
      opt.tol = est.tol;
      opt.max_iter = est.max_iter;
      opt.inner = inner;
      if (!lambda) return solution_path(X, est.gamma, K, delta, opt);
      return single_point(X, *lambda, [&] { return fit(X, RobustConfig{est.gamma, *lambda}, std::nullopt, opt); });
    }
    case Estimator::glasso:
      if (!lambda) return glasso_path(X, K, delta, inner);
      return single_point(X, *lambda, [&] { return fit_glasso(X, *lambda, inner); });
    case Estimator::tlasso: {
      TlassoConfig cfg;
      cfg.nu = est.nu;
      cfg.inner = inner;
      if (!lambda) return tlasso_path(X, cfg, K, delta);
      cfg.lambda = *lambda;
      return single_point(X, *lambda, [&] { return fit_tlasso(X, cfg); });
    }
    case Estimator::npn: {
      NpnConfig cfg;
      cfg.delta_n = est.delta_n;
      cfg.use_correlation = est.npn_correlation;
      cfg.inner = inner;
      if (!lambda) return npn_path(X, cfg, K, delta);
      cfg.lambda = *lambda;
      return single_point(X, *lambda, [&] { return fit_nonparanormal(X, cfg); });
    }
  }
  throw std::logic_error("unreachable");
}

Json fit_to_json(const FitResult& f, const EdgeSet& edges) {
  Json j;
  j["lambda"] = f.config.lambda;
  j["converged"] = f.converged;
  j["iterations"] = f.mm_iterations;
  j["inner_kkt_max"] = f.inner_kkt_max;
  j["mu"] = to_json(f.theta.mu);
  j["omega"] = io::to_json(f.theta.omega.dense());
  j["edges"] = io::to_json(edges);
  j["weights"] = to_json(f.weights.w);
  j["objective_trace"] = f.objective_trace;
  return j;
}

int run_fit(const FitArgs& args, std::ostream& err) {
  try {
    if (args.lambda && !(*args.lambda >= 0.0)) throw InputError("--lambda must be >= 0");
    if (args.est.gamma < 0.0) throw InputError("--gamma must be >= 0");
    if (!(args.est.nu > 0.0)) throw InputError("--nu must be > 0");
    if (args.K < 2) throw InputError("--K must be >= 2");
    if (!(args.delta > 0.0 && args.delta < 1.0)) throw InputError("--delta must lie in (0, 1)");
    const Dataset raw = io::read_csv(args.input);
    const Dataset X = normalize(raw, args.normalize);
    const SolutionPath path = estimate(X, args.est, args.lambda, args.K, args.delta);
    ensure_dir(args.out_dir);

    Json config = estimator_json(args.est);
    config["input"] = args.input;
    config["normalize"] = to_string(args.normalize);
    if (args.lambda)
      config["lambda"] = *args.lambda;
    else {
      config["lambda_grid"] = "default";
      config["K"] = args.K;
      config["delta"] = args.delta;
    }
    config["seed"] = args.seed;

    Json out;
    out["config"] = config;
    out["names"] = X.names;
    if (X.normalization) {
      out["normalization"] = {{"method", to_string(X.normalization->method)},
                              {"center", to_json(X.normalization->center)},
                              {"scale", to_json(X.normalization->scale)}};
    }
    if (!args.lambda) out["lambda_max"] = path.lambda_max;
    Json fits = Json::array();
    std::ostringstream tsv;
    tsv << "lambda\tnnz\tobjective\tedge_hash\tstatus\n";
    for (std::size_t k = 0; k < path.fits.size(); ++k) {
      const FitResult& f = path.fits[k];
      const EdgeSet e = edge_set(f.theta.omega);
      Json jf = fit_to_json(f, e);
      jf["lambda"] = path.lambdas[k];
      jf["status"] = status_name(path.status[k]);
      if (!path.messages[k].empty()) jf["message"] = path.messages[k];
      fits.push_back(std::move(jf));
      tsv << io::format_double(path.lambdas[k]) << '\t' << 2 * e.size() << '\t'
          << (f.objective_trace.empty() ? std::string("nan") : io::format_double(f.objective_trace.back())) << '\t'
          << hex64(edge_hash(e)) << '\t' << status_name(path.status[k]) << '\n';
    }
    out["fits"] = std::move(fits);
    io::write_json(join(args.out_dir, "fit.json"), out);
    if (!args.lambda) io::write_text(join(args.out_dir, "path.tsv"), tsv.str());
    if (!all_ok(path)) {
      err << "rggm fit: estimation did not fully converge (" << first_message(path) << ")\n";
      return kExitSoft;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "rggm fit: " << e.what() << '\n';
    return kExitInput;
  }
}

int run_simulate(const SimulateArgs& args, std::ostream& err) {
  try {
    args.spec.validate();
    const Simulation sim = simulate(args.spec);
    ensure_dir(args.out_dir);
    io::write_csv(join(args.out_dir, "data.csv"), sim.sample.data);
    Json truth;
    truth["spec"] = spec_json(args.spec);
    truth["omega"] = io::to_json(sim.truth.omega.dense());
    truth["edges"] = io::to_json(sim.truth.adjacency);
    Json labels = Json::array();
    for (bool b : sim.sample.labels) labels.push_back(b);
    truth["labels"] = std::move(labels);
    io::write_json(join(args.out_dir, "truth.json"), truth);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "rggm simulate: " << e.what() << '\n';
    return kExitInput;
  }
}

namespace {

struct FitFile {
  std::vector<double> lambdas;
  std::vector<SymMatrix> omegas;
};

FitFile load_fit(const std::string& path) {
  const Json j = io::read_json(path);
  if (!j.contains("fits") || !j["fits"].is_array()) throw InputError(path + ": missing 'fits' array");
  FitFile f;
  for (const auto& jf : j["fits"]) {
    if (!jf.contains("omega") || !jf.contains("lambda")) throw InputError(path + ": fit entry lacks omega/lambda");
    const Matrix m = io::matrix_from_json(jf["omega"]);
    if (m.rows() != m.cols()) throw InputError(path + ": omega is not square");
    f.lambdas.push_back(jf["lambda"].get<double>());
    f.omegas.push_back(SymMatrix::symmetrized(m));
  }
  return f;
}

}  // namespace

int run_evaluate(const EvaluateArgs& args, std::ostream& err) {
  try {
    const FitFile fit = load_fit(args.fit);
    if (fit.omegas.empty()) throw InputError(args.fit + ": no fits");
    const Index p = fit.omegas.front().dim();
    Json out;
    out["config"] = {{"fit", args.fit}};
    if (args.truth) out["config"]["truth"] = *args.truth;
    if (args.compare) out["config"]["compare"] = *args.compare;
    out["config"]["zero_tol"] = 1e-8;

    std::optional<SymMatrix> truth_omega;
    std::optional<EdgeSet> truth_edges;
    if (args.truth) {
      const Json t = io::read_json(*args.truth);
      if (!t.contains("omega") || !t.contains("edges")) throw InputError(*args.truth + ": missing omega/edges");
      truth_omega = SymMatrix::symmetrized(io::matrix_from_json(t["omega"]));
      if (truth_omega->dim() != p) throw DimensionMismatch("truth and fit have different dimensions");
      truth_edges = io::edges_from_json(t["edges"], p);
    }
    std::optional<FitFile> other;
    if (args.compare) {
      other = load_fit(*args.compare);
      if (other->omegas.empty() || other->omegas.front().dim() != p)
        throw DimensionMismatch("compared fits have different dimensions");
    }

    Json rows = Json::array();
    for (std::size_t k = 0; k < fit.omegas.size(); ++k) {
      if (fit.omegas[k].dim() != p) throw DimensionMismatch("fits within one file differ in dimension");
      const EdgeSet e = edge_set(fit.omegas[k]);
      Json r;
      r["lambda"] = fit.lambdas[k];
      r["nnz"] = 2 * e.size();
      if (truth_omega) {
        r["tpr"] = roc_point(e, *truth_edges).tpr;
        r["mse_offdiag"] = mse_offdiag(fit.omegas[k], *truth_omega);
      }
      if (other && k < other->omegas.size()) {
        const EdgeSet b = edge_set(other->omegas[k]);
        r["total_agreement"] = total_agreement(e, b);
        r["common_edges"] = common_edges(e, b);
      }
      rows.push_back(std::move(r));
    }
    out["rows"] = std::move(rows);
    ensure_dir(args.out_dir);
    io::write_json(join(args.out_dir, "metrics.json"), out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "rggm evaluate: " << e.what() << '\n';
    return kExitInput;
  }
}

namespace {

struct MethodRun {
  std::vector<double> lambdas;
  std::vector<Index> nnz;
  std::vector<double> tpr;
  std::vector<double> mse;
  std::vector<std::string> status;
  RocCurve roc;
  double min_mse = 0.0;
  double best_f1 = 0.0;
  double kkt_max = 0.0;
};

struct Replicate {
  std::vector<MethodRun> runs;
  Index truth_edges = 0;
  Index contaminated = 0;
};

Replicate run_replicate(const BenchArgs& a, std::uint64_t r) {
  const Simulation sim = simulate(a.spec, r);
  Replicate rep;
  rep.truth_edges = sim.truth.adjacency.size();
  rep.contaminated = std::count(sim.sample.labels.begin(), sim.sample.labels.end(), true);
  for (Estimator e : a.estimators) {
    EstimatorParams est = a.est;
    est.estimator = e;
    const SolutionPath path = estimate(sim.sample.data, est, std::nullopt, a.K, a.delta);
    MethodRun m;
    m.lambdas = path.lambdas;
    m.min_mse = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.fits.size(); ++k) {
      const EdgeSet est_edges = edge_set(path.fits[k].theta.omega);
      const RocPoint pt = roc_point(est_edges, sim.truth.adjacency);
      m.nnz.push_back(pt.nnz);
      m.tpr.push_back(pt.tpr);
      m.mse.push_back(mse_offdiag(path.fits[k].theta.omega, sim.truth.omega));
      m.status.push_back(status_name(path.status[k]));
      m.min_mse = std::min(m.min_mse, m.mse.back());
      m.best_f1 = std::max(m.best_f1, f1_score(est_edges, sim.truth.adjacency));
      m.kkt_max = std::max(m.kkt_max, path.fits[k].inner_kkt_max);
    }
    m.roc = roc_points(path, sim.truth.adjacency);
    rep.runs.push_back(std::move(m));
  }
  return rep;
}

unsigned worker_count(const BenchArgs& a) {
  unsigned n = a.threads;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RGGM_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
  }
  return std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(a.replicates)));
}

double median_of(std::vector<double> v) { return median(std::move(v)); }

}  // namespace

int run_bench(const BenchArgs& a, std::ostream& err) {
  try {
    a.spec.validate();
    if (a.replicates < 1) throw InputError("--replicates must be >= 1");
    if (a.estimators.empty()) throw InputError("no estimators selected");
    const auto R = static_cast<std::size_t>(a.replicates);
    std::vector<Replicate> reps(R);
    std::vector<std::string> errors(R);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex log_mu;
    auto worker = [&] {
      for (std::size_t r = next++; r < R; r = next++) {
        try {
          reps[r] = run_replicate(a, r);
        } catch (const std::exception& e) {
          errors[r] = e.what();
        }
        const std::size_t d = ++done;
        if (!a.quiet) {
          std::lock_guard<std::mutex> lock(log_mu);
          err << "bench: " << d << "/" << R << " replicates\n";
        }
      }
    };
    std::vector<std::thread> pool;
    const unsigned nw = worker_count(a);
    for (unsigned t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (std::size_t r = 0; r < R; ++r)
      if (!errors[r].empty()) throw std::runtime_error("replicate " + std::to_string(r) + ": " + errors[r]);

    const std::size_t M = a.estimators.size();
    // Common nnz grid: even counts up to the smallest per-method median of the
    // per-replicate maximum nnz, so every curve is supported by most replicates.
    Index cap = std::numeric_limits<Index>::max();
    for (std::size_t m = 0; m < M; ++m) {
      std::vector<double> maxima;
      for (const auto& rep : reps) maxima.push_back(static_cast<double>(rep.runs[m].roc.points.back().nnz));
      cap = std::min(cap, static_cast<Index>(std::floor(median_of(maxima))));
    }
    std::vector<Index> grid;
    for (Index g = 2; g <= cap; g += 2) grid.push_back(g);

    std::vector<std::vector<double>> curves(M);
    for (std::size_t m = 0; m < M; ++m) {
      std::vector<RocCurve> cs;
      for (const auto& rep : reps) cs.push_back(rep.runs[m].roc);
      curves[m] = mean_tpr(cs, grid);
    }

    std::ostringstream roc;
    roc << "nnz";
    for (Estimator e : a.estimators) roc << '\t' << to_string(e);
    roc << '\n';
    for (std::size_t g = 0; g < grid.size(); ++g) {
      roc << grid[g];
      for (std::size_t m = 0; m < M; ++m) roc << '\t' << io::format_double(curves[m][g]);
      roc << '\n';
    }
    std::ostringstream mse;
    mse << "replicate";
    for (Estimator e : a.estimators) mse << '\t' << to_string(e);
    mse << '\n';
    for (std::size_t r = 0; r < R; ++r) {
      mse << r;
      for (std::size_t m = 0; m < M; ++m) mse << '\t' << io::format_double(reps[r].runs[m].min_mse);
      mse << '\n';
    }

    Json config;
    config["spec"] = spec_json(a.spec);
    config["replicates"] = a.replicates;
    Json ests = Json::array();
    for (Estimator e : a.estimators) ests.push_back(to_string(e));
    config["estimators"] = ests;
    config["gamma"] = a.est.gamma;
    config["nu"] = a.est.nu;
    config["delta_n"] = a.est.delta_n ? Json(*a.est.delta_n) : Json("auto");
    config["K"] = a.K;
    config["delta"] = a.delta;
    config["tol"] = a.est.tol;
    config["inner_tol"] = a.est.inner_tol;

    Json out;
    out["config"] = config;
    out["metadata"] = {
        {"roc_interpolation",
         "per-replicate step function carried forward from the largest path nnz <= grid value, then averaged"},
        {"nnz_grid", "even values from 2 to the minimum over methods of the median per-replicate maximum nnz"},
        {"nnz_counts", "off-diagonal elements, both triangles"},
        {"stream_rule", "splitmix64(seed, purpose, replicate) seeds mt19937_64 per purpose"}};
    out["nnz_grid"] = grid;
    Json mean_curves;
    for (std::size_t m = 0; m < M; ++m) mean_curves[to_string(a.estimators[m])] = curves[m];
    out["mean_tpr"] = mean_curves;

    Json summary;
    double kkt = 0.0;
    for (const auto& rep : reps)
      for (const auto& run : rep.runs) kkt = std::max(kkt, run.kkt_max);
    summary["kkt_max"] = kkt;
    const auto gi = std::find(a.estimators.begin(), a.estimators.end(), Estimator::gamma);
    const auto li = std::find(a.estimators.begin(), a.estimators.end(), Estimator::glasso);
    if (gi != a.estimators.end() && li != a.estimators.end()) {
      const auto g = static_cast<std::size_t>(gi - a.estimators.begin());
      const auto l = static_cast<std::size_t>(li - a.estimators.begin());
      std::size_t dom = 0;
      for (std::size_t k = 0; k < grid.size(); ++k) dom += curves[g][k] >= curves[l][k] ? 1 : 0;
      std::size_t wins = 0;
      for (const auto& rep : reps) wins += rep.runs[g].min_mse < rep.runs[l].min_mse ? 1 : 0;
      summary["gamma_vs_glasso_tpr_dominance"] = grid.empty() ? 0.0 : double(dom) / double(grid.size());
      summary["gamma_vs_glasso_mse_wins"] = double(wins) / double(R);
    }
    out["summary"] = summary;

    Json jreps = Json::array();
    for (std::size_t r = 0; r < R; ++r) {
      Json jr;
      jr["replicate"] = r;
      jr["truth_edges"] = reps[r].truth_edges;
      jr["contaminated"] = reps[r].contaminated;
      for (std::size_t m = 0; m < M; ++m) {
        const MethodRun& run = reps[r].runs[m];
        jr[to_string(a.estimators[m])] = {{"lambda", run.lambdas},    {"nnz", run.nnz},
                                          {"tpr", run.tpr},           {"mse_offdiag", run.mse},
                                          {"status", run.status},     {"min_mse", run.min_mse},
                                          {"best_f1", run.best_f1},   {"kkt_max", run.kkt_max}};
      }
      jreps.push_back(std::move(jr));
    }
    out["replicates"] = std::move(jreps);

    ensure_dir(a.out_dir);
    io::write_text(join(a.out_dir, "roc.tsv"), roc.str());
    io::write_text(join(a.out_dir, "mse.tsv"), mse.str());
    io::write_json(join(a.out_dir, "bench.json"), out);
    for (const auto& rep : reps)
      for (const auto& run : rep.runs)
        for (const auto& s : run.status)
          if (s != "ok") {
            err << "rggm bench: some path points did not converge (see bench.json status)\n";
            return kExitSoft;
          }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "rggm bench: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace rggm::app
