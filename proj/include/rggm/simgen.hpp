#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rggm/eval.hpp"

namespace rggm {

/// Seedable generator with platform-independent uniform and normal draws
/// (std::*_distribution output is implementation defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  /// Standard normal, Marsaglia polar method.
  double normal();
  /// Uniform on {0, …, n−1}.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class StreamPurpose : std::uint64_t { graph = 1, precision = 2, sample = 3 };

/// Stream seed for (seed, purpose, replicate): splitmix64 folded over the
/// three words. Distinct purposes and replicates get unrelated streams, and
/// every method in a paired comparison sees the same data for a replicate.
std::uint64_t derive_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t replicate);

enum class ContaminationModel { i, ii, iii };

struct SimSpec {
  Index p = 25;
  Index n = 200;
  ContaminationModel model = ContaminationModel::ii;
  double epsilon = 0.1;
  double eta = 5.0;
  int ba_edges_per_node = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GroundTruth {
  SymMatrix omega;
  EdgeSet adjacency;
  /// Shifted adjacency-weight matrix before the unit-variance rescaling.
  SymMatrix omega_tilde;
};

/// Preferential attachment grown from a complete graph on m+1 nodes; each new
/// node joins m distinct existing nodes chosen with probability ∝ degree.
EdgeSet ba_graph(Index p, int m, Rng& rng);

/// Signed magnitudes in [0.25, 0.75] on the edges, symmetrized, shifted to
/// minimum eigenvalue 0.1, then rescaled so that diag(Ω⁻¹) = 1.
GroundTruth make_precision(const EdgeSet& adj, Rng& rng);

struct Sample {
  Dataset data;
  /// true for rows drawn from the contaminating component.
  std::vector<bool> labels;
};

Sample sample_contaminated(const SimSpec& spec, const GroundTruth& truth, Rng& rng);

struct Simulation {
  GroundTruth truth;
  Sample sample;
};

/// Graph, precision and sample for one replicate, each from its own stream.
Simulation simulate(const SimSpec& spec, std::uint64_t replicate = 0);

}  // namespace rggm
