#include "rggm/simgen.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rggm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kCollisionTol = 1e-6;
constexpr int kMaxResamples = 1000;

double draw_weight(Rng& rng) {
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return sign * (0.25 + 0.5 * rng.uniform());
}

}  // namespace

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  return std::min<std::uint64_t>(n - 1, static_cast<std::uint64_t>(uniform() * static_cast<double>(n)));
}

std::uint64_t derive_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t replicate) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return splitmix64(h ^ replicate);
}

void SimSpec::validate() const {
  if (p < 2) throw std::invalid_argument("p must be >= 2");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1)");
  if (!std::isfinite(eta)) throw std::invalid_argument("eta must be finite");
  if (ba_edges_per_node < 1) throw std::invalid_argument("m must be >= 1");
  if (static_cast<Index>(ba_edges_per_node) >= p) throw std::invalid_argument("m must be < p");
}

EdgeSet ba_graph(Index p, int m, Rng& rng) {
  if (m < 1 || static_cast<Index>(m) >= p) throw std::invalid_argument("ba_graph requires p > m >= 1");
  EdgeSet g(p);
  std::vector<std::uint64_t> degree(static_cast<std::size_t>(p), 0);
  for (Index i = 0; i <= m; ++i)
    for (Index j = i + 1; j <= m; ++j) {
      g.add(i, j);
      ++degree[static_cast<std::size_t>(i)];
      ++degree[static_cast<std::size_t>(j)];
    }
  for (Index v = m + 1; v < p; ++v) {
    std::uint64_t total = 0;
    for (Index u = 0; u < v; ++u) total += degree[static_cast<std::size_t>(u)];
    std::vector<Index> picked;
    while (static_cast<int>(picked.size()) < m) {
      std::uint64_t r = rng.below(total);
      Index u = 0;
      while (r >= degree[static_cast<std::size_t>(u)]) r -= degree[static_cast<std::size_t>(u++)];
      if (std::find(picked.begin(), picked.end(), u) == picked.end()) picked.push_back(u);
    }
    for (Index u : picked) {
      g.add(u, v);
      ++degree[static_cast<std::size_t>(u)];
      ++degree[static_cast<std::size_t>(v)];
    }
  }
  return g;
}

GroundTruth make_precision(const EdgeSet& adj, Rng& rng) {
  const Index p = adj.p;
  Matrix e = Matrix::Zero(p, p);
  for (const auto& [i, j] : adj.edges) {
    double v = 0.0;
    int tries = 0;
    do {
      if (++tries > kMaxResamples) throw SupportCollision("could not draw a non-vanishing edge weight");
      v = 0.5 * (draw_weight(rng) + draw_weight(rng));
    } while (std::abs(v) < kCollisionTol);
    e(i, j) = v;
    e(j, i) = v;
  }
  const double lmin = p > 0 ? Eigen::SelfAdjointEigenSolver<Matrix>(e, Eigen::EigenvaluesOnly).eigenvalues()(0) : 0.0;
  Matrix tilde = e;
  tilde.diagonal().array() += 0.1 - lmin;
  GroundTruth gt;
  gt.omega_tilde = SymMatrix::from_dense(tilde);
  const Vector l = spd_factorize(gt.omega_tilde).inverse().diag();
  const Vector root = l.array().sqrt();
  gt.omega = SymMatrix::symmetrized(root.asDiagonal() * tilde * root.asDiagonal());
  gt.adjacency = edge_set(gt.omega, 0.0);
  if (gt.adjacency != adj) throw SupportCollision("precision support differs from the adjacency");
  return gt;
}

Sample sample_contaminated(const SimSpec& spec, const GroundTruth& truth, Rng& rng) {
  spec.validate();
  const Index p = spec.p;
  if (truth.omega.dim() != p) throw DimensionMismatch("truth dimension does not match the spec");
  const Matrix chol = spd_factorize(spd_factorize(truth.omega).inverse()).lower();
  const double outlier_sd = std::sqrt(30.0);
  const Index block = spec.model == ContaminationModel::iii ? std::min<Index>(20, p) : p;

  Sample s{Dataset(Matrix(spec.n, p)), std::vector<bool>(static_cast<std::size_t>(spec.n), false)};
  for (Index j = 0; j < p; ++j) s.data.names.push_back("x" + std::to_string(j + 1));
  Vector z(p);
  for (Index i = 0; i < spec.n; ++i) {
    const bool bad = rng.uniform() < spec.epsilon;
    for (Index j = 0; j < p; ++j) z(j) = rng.normal();
    s.labels[static_cast<std::size_t>(i)] = bad;
    if (!bad) {
      s.data.x.row(i) = (chol * z).transpose();
      continue;
    }
    switch (spec.model) {
      case ContaminationModel::i:
        s.data.x.row(i) = outlier_sd * z.transpose();
        break;
      case ContaminationModel::ii:
      case ContaminationModel::iii:
        z.head(block).array() += spec.eta;
        s.data.x.row(i) = z.transpose();
        break;
    }
  }
  return s;
}

Simulation simulate(const SimSpec& spec, std::uint64_t replicate) {
  spec.validate();
  Rng graph_rng(derive_seed(spec.seed, StreamPurpose::graph, replicate));
  Rng weight_rng(derive_seed(spec.seed, StreamPurpose::precision, replicate));
  Rng sample_rng(derive_seed(spec.seed, StreamPurpose::sample, replicate));
  Simulation sim;
  sim.truth = make_precision(ba_graph(spec.p, spec.ba_edges_per_node, graph_rng), weight_rng);
  sim.sample = sample_contaminated(spec, sim.truth, sample_rng);
  return sim;
}

}  // namespace rggm
