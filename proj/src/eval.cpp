#include "rggm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rggm {

void EdgeSet::add(Index i, Index j) {
  if (i == j) throw std::invalid_argument("edge set: self-loop");
  if (i < 0 || j < 0 || i >= p || j >= p) throw std::out_of_range("edge set: node index out of range");
  edges.emplace(std::min(i, j), std::max(i, j));
}

bool EdgeSet::contains(Index i, Index j) const { return edges.count({std::min(i, j), std::max(i, j)}) > 0; }

EdgeSet edge_set(const SymMatrix& omega, double zero_tol) {
  EdgeSet e(omega.dim());
  for (Index i = 0; i < omega.dim(); ++i)
    for (Index j = i + 1; j < omega.dim(); ++j)
      if (std::abs(omega(i, j)) > zero_tol) e.edges.emplace(i, j);
  return e;
}

RocPoint roc_point(const EdgeSet& estimated, const EdgeSet& truth) {
  if (truth.empty()) throw EmptyTruth();
  if (estimated.p != truth.p) throw DimensionMismatch("roc: dimension mismatch");
  return RocPoint{2 * estimated.size(),
                  static_cast<double>(common_edges(estimated, truth)) / static_cast<double>(truth.size())};
}

RocCurve roc_points(const std::vector<SymMatrix>& omegas, const EdgeSet& truth) {
  if (truth.empty()) throw EmptyTruth();
  RocCurve c;
  for (const auto& om : omegas) c.points.push_back(roc_point(edge_set(om), truth));
  std::stable_sort(c.points.begin(), c.points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.nnz != b.nnz ? a.nnz < b.nnz : a.tpr < b.tpr;
  });
  return c;
}

RocCurve roc_points(const SolutionPath& path, const EdgeSet& truth) {
  std::vector<SymMatrix> omegas;
  omegas.reserve(path.fits.size());
  for (const auto& f : path.fits) omegas.push_back(f.theta.omega);
  return roc_points(omegas, truth);
}

double mse_offdiag(const SymMatrix& est, const SymMatrix& truth) {
  if (est.dim() != truth.dim()) throw DimensionMismatch("mse_offdiag: dimension mismatch");
  const Index p = est.dim();
  if (p < 2) return 0.0;
  Matrix d = est.dense() - truth.dense();
  d.diagonal().setZero();
  return d.squaredNorm() / static_cast<double>(p * (p - 1));
}

Index common_edges(const EdgeSet& a, const EdgeSet& b) {
  if (a.p != b.p) throw DimensionMismatch("edge sets live on different node counts");
  Index n = 0;
  for (const auto& e : a.edges) n += b.edges.count(e) > 0 ? 1 : 0;
  return n;
}

double total_agreement(const EdgeSet& a, const EdgeSet& b) {
  const Index both = common_edges(a, b);
  const Index total = a.p * (a.p - 1) / 2;
  if (total == 0) return 1.0;
  const Index neither = total - a.size() - b.size() + both;
  return static_cast<double>(both + neither) / static_cast<double>(total);
}

double f1_score(const EdgeSet& estimated, const EdgeSet& truth) {
  const Index tp = common_edges(estimated, truth);
  const Index denom = estimated.size() + truth.size();
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

Dataset normalize(const Dataset& X, NormalizeMethod method) {
  if (method == NormalizeMethod::none) return X;
  const Index n = X.n();
  const Index p = X.p();
  if (n < 2) throw EmptyDataset();
  Normalization norm{method, Vector(p), Vector(p)};
  for (Index j = 0; j < p; ++j) {
    if (method == NormalizeMethod::sd) {
      const double m = X.x.col(j).mean();
      norm.center(j) = m;
      norm.scale(j) = std::sqrt((X.x.col(j).array() - m).square().sum() / static_cast<double>(n - 1));
    } else {
      const auto c = column(X, j);
      norm.center(j) = median(c);
      norm.scale(j) = kMadConstant * raw_mad(c);
    }
    if (!(norm.scale(j) > 0.0) || !std::isfinite(norm.scale(j))) throw DegenerateColumn(static_cast<int>(j));
  }
  Dataset out((X.x.rowwise() - norm.center.transpose()).array().rowwise() / norm.scale.transpose().array());
  out.names = X.names;
  out.normalization = std::move(norm);
  return out;
}

double tpr_at(const RocCurve& curve, Index nnz) {
  double v = 0.0;
  for (const auto& pt : curve.points) {
    if (pt.nnz > nnz) break;
    v = pt.tpr;
  }
  return v;
}

std::vector<double> mean_tpr(const std::vector<RocCurve>& curves, const std::vector<Index>& grid) {
  std::vector<double> out(grid.size(), 0.0);
  if (curves.empty()) return out;
  for (const auto& c : curves)
    for (std::size_t g = 0; g < grid.size(); ++g) out[g] += tpr_at(c, grid[g]);
  for (auto& v : out) v /= static_cast<double>(curves.size());
  return out;
}

std::uint64_t edge_hash(const EdgeSet& e) {
  std::uint64_t h = 14695981039346656037ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [i, j] : e.edges) feed(std::to_string(i + 1) + "-" + std::to_string(j + 1) + ";");
  return h;
}

}  // namespace rggm
