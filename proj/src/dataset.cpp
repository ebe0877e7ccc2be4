#include "rggm/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace rggm {

double median(std::vector<double> v) {
  if (v.empty()) throw EmptyDataset();
  const auto n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double hi = *mid;
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

double raw_mad(const std::vector<double>& v) {
  const double m = median(v);
  std::vector<double> dev(v.size());
  std::transform(v.begin(), v.end(), dev.begin(), [m](double x) { return std::abs(x - m); });
  return median(std::move(dev));
}

std::vector<double> column(const Dataset& d, Index j) {
  std::vector<double> c(static_cast<std::size_t>(d.n()));
  for (Index i = 0; i < d.n(); ++i) c[static_cast<std::size_t>(i)] = d.x(i, j);
  return c;
}

}  // namespace rggm
