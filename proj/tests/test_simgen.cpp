#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "rggm/errors.hpp"
#include "rggm/simgen.hpp"

using namespace rggm;

namespace {

bool connected(const EdgeSet& e) {
  std::vector<int> seen(static_cast<std::size_t>(e.p), 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : e.edges) {
      const Index u = a == v ? b : (b == v ? a : -1);
      if (u >= 0 && !seen[static_cast<std::size_t>(u)]) seen[static_cast<std::size_t>(u)] = 1, stack.push_back(u);
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

double min_eig(const Matrix& m) { return Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues()(0); }

}  // namespace

TEST_CASE("rng is reproducible and well spread") {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) REQUIRE(a.normal() == b.normal());
  Rng r(1);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.01);
  CHECK(derive_seed(1, StreamPurpose::graph, 0) != derive_seed(1, StreamPurpose::sample, 0));
  CHECK(derive_seed(1, StreamPurpose::graph, 0) != derive_seed(1, StreamPurpose::graph, 1));
}

TEST_CASE("Barabasi-Albert graph") {
  Rng rng(1);
  const EdgeSet t = ba_graph(5, 1, rng);
  CHECK(t.size() == 4);
  CHECK(connected(t));
  for (int m : {1, 2, 3}) {
    Rng r(static_cast<std::uint64_t>(m));
    const EdgeSet g = ba_graph(50, m, r);
    CHECK(g.size() == m * (50 - m) + m * (m - 1) / 2);
    CHECK(connected(g));
  }
  CHECK_THROWS_AS(ba_graph(3, 3, rng), std::invalid_argument);

  // heavy tail against Erdős–Rényi with the same edge count
  int heavier = 0;
  for (int t2 = 0; t2 < 200; ++t2) {
    Rng r(1000 + static_cast<std::uint64_t>(t2));
    const EdgeSet ba = ba_graph(100, 1, r);
    std::vector<int> dba(100, 0), der(100, 0);
    for (const auto& [i, j] : ba.edges) ++dba[static_cast<std::size_t>(i)], ++dba[static_cast<std::size_t>(j)];
    std::set<std::pair<Index, Index>> er;
    while (er.size() < ba.edges.size()) {
      const Index i = static_cast<Index>(r.below(100)), j = static_cast<Index>(r.below(100));
      if (i != j) er.emplace(std::min(i, j), std::max(i, j));
    }
    for (const auto& [i, j] : er) ++der[static_cast<std::size_t>(i)], ++der[static_cast<std::size_t>(j)];
    if (*std::max_element(dba.begin(), dba.end()) > *std::max_element(der.begin(), der.end())) ++heavier;
  }
  CHECK(heavier >= 180);
}

TEST_CASE("precision construction invariants over random specs") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng r(s);
    const Index p = 2 + static_cast<Index>(s % 30);
    const int m = 1 + static_cast<int>(s % 3);
    if (m >= p) continue;
    const EdgeSet adj = ba_graph(p, m, r);
    const GroundTruth gt = make_precision(adj, r);
    REQUIRE_NOTHROW(spd_factorize(gt.omega));
    REQUIRE(std::abs(min_eig(gt.omega_tilde.dense()) - 0.1) < 1e-9);
    const Matrix sig = oracle::gauss_jordan_inverse(gt.omega.dense());
    REQUIRE((sig.diagonal().array() - 1.0).abs().maxCoeff() < 1e-8);
    REQUIRE(gt.adjacency == adj);
    REQUIRE(edge_set(gt.omega, 0.0) == adj);
    for (const auto& [i, j] : adj.edges) REQUIRE(std::abs(gt.omega_tilde(i, j)) <= 0.75);
  }
  Rng r(3);
  const GroundTruth empty = make_precision(EdgeSet(4), r);
  CHECK((empty.omega.dense() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("edge weights are drawn from the two-sided interval") {
  // a single-edge graph exposes Ẽ₁₂ = (E₁₂ + E₂₁)/2 with each E in ±[0.25, 0.75]
  int both_signs = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng r(s);
    EdgeSet e(2);
    e.add(0, 1);
    const GroundTruth gt = make_precision(e, r);
    const double w = gt.omega_tilde(0, 1);
    REQUIRE(std::abs(w) <= 0.75);
    REQUIRE(std::abs(w) >= 1e-6);
    both_signs += w > 0 ? 1 : 0;
  }
  CHECK(both_signs > 60);
  CHECK(both_signs < 140);
}

TEST_CASE("contaminated sampling") {
  SimSpec spec;
  spec.p = 5;
  spec.n = 20000;
  spec.epsilon = 0.0;
  spec.seed = 3;
  const Simulation clean = simulate(spec);
  CHECK(std::none_of(clean.sample.labels.begin(), clean.sample.labels.end(), [](bool b) { return b; }));
  const Matrix c = clean.sample.data.x.rowwise() - clean.sample.data.x.colwise().mean();
  const Matrix cov = c.transpose() * c / 20000.0;
  CHECK((cov - oracle::gauss_jordan_inverse(clean.truth.omega.dense())).norm() < 0.2);

  SimSpec s3;
  s3.p = 100;
  s3.n = 20000;
  s3.model = ContaminationModel::iii;
  s3.epsilon = 0.5;
  s3.eta = 3.0;
  const Simulation sim = simulate(s3);
  Vector mean = Vector::Zero(100);
  Index k = 0;
  for (Index i = 0; i < s3.n; ++i)
    if (sim.sample.labels[static_cast<std::size_t>(i)]) mean += sim.sample.data.x.row(i).transpose(), ++k;
  mean /= static_cast<double>(k);
  const double se = 1.0 / std::sqrt(static_cast<double>(k));
  for (Index j = 0; j < 100; ++j) CHECK(std::abs(mean(j) - (j < 20 ? 3.0 : 0.0)) < 3.5 * se);

  SimSpec s1;
  s1.p = 3;
  s1.n = 100000;
  s1.epsilon = 0.1;
  s1.model = ContaminationModel::i;
  const Simulation big = simulate(s1);
  const double frac =
      static_cast<double>(std::count(big.sample.labels.begin(), big.sample.labels.end(), true)) / 100000.0;
  const double half_width = 2.5758 * std::sqrt(0.1 * 0.9 / 100000.0);
  CHECK(std::abs(frac - 0.1) < half_width);
  double var = 0;
  Index nb = 0;
  for (Index i = 0; i < s1.n; ++i)
    if (big.sample.labels[static_cast<std::size_t>(i)]) var += big.sample.data.x.row(i).squaredNorm(), ++nb;
  CHECK(var / (3.0 * nb) == doctest::Approx(30.0).epsilon(0.03));
}

TEST_CASE("simulation is a pure function of the spec") {
  SimSpec spec;
  spec.p = 10;
  spec.n = 50;
  const Simulation a = simulate(spec, 4), b = simulate(spec, 4), c = simulate(spec, 5);
  CHECK(a.sample.data.x == b.sample.data.x);
  CHECK(a.truth.omega == b.truth.omega);
  CHECK(a.sample.labels == b.sample.labels);
  CHECK(a.sample.data.x != c.sample.data.x);
  SimSpec bad = spec;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
