#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "rggm/dataset.hpp"
#include "rggm/gamma_mm.hpp"

namespace rggm {

/// Undirected simple graph on p nodes. Indices are zero-based here and
/// one-based in every file format.
struct EdgeSet {
  Index p = 0;
  std::set<std::pair<Index, Index>> edges;

  EdgeSet() = default;
  explicit EdgeSet(Index nodes) : p(nodes) {}

  /// Order of (i, j) does not matter; self-loops and out-of-range indices throw.
  void add(Index i, Index j);
  bool contains(Index i, Index j) const;
  Index size() const noexcept { return static_cast<Index>(edges.size()); }
  bool empty() const noexcept { return edges.empty(); }

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;
};

struct RocPoint {
  Index nnz = 0;
  double tpr = 0.0;
};

struct RocCurve {
  /// Sorted by nnz, ties by tpr.
  std::vector<RocPoint> points;
};

/// {(i, j) : i < j, |ω_ij| > zero_tol}.
EdgeSet edge_set(const SymMatrix& omega, double zero_tol = 1e-8);

/// nnz = 2·|Ê| (both triangles), tpr = |Ê ∩ T| / |T|.
RocPoint roc_point(const EdgeSet& estimated, const EdgeSet& truth);
RocCurve roc_points(const SolutionPath& path, const EdgeSet& truth);
RocCurve roc_points(const std::vector<SymMatrix>& omegas, const EdgeSet& truth);

double mse_offdiag(const SymMatrix& est, const SymMatrix& truth);

Index common_edges(const EdgeSet& a, const EdgeSet& b);
/// (|A∩B| + |Aᶜ∩Bᶜ|) / C(p, 2).
double total_agreement(const EdgeSet& a, const EdgeSet& b);

/// F1 of the estimated support against the truth; 0 when both are empty.
double f1_score(const EdgeSet& estimated, const EdgeSet& truth);

/// Columnwise (x − center)/scale. sd: mean and n−1 standard deviation;
/// mad: median and 1.4826·MAD. `none` returns the input unchanged.
Dataset normalize(const Dataset& X, NormalizeMethod method);

/// Step-function value of the curve at `nnz`: the tpr of the last point with
/// nnz ≤ `nnz`, or 0 if there is none.
double tpr_at(const RocCurve& curve, Index nnz);

/// Mean over curves of tpr_at at each grid value.
std::vector<double> mean_tpr(const std::vector<RocCurve>& curves, const std::vector<Index>& grid);

/// 64-bit FNV-1a over the one-based edge list "i-j;" in sorted order.
std::uint64_t edge_hash(const EdgeSet& e);

}  // namespace rggm
