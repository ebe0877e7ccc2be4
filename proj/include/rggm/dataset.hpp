#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rggm/matcore.hpp"

namespace rggm {

enum class NormalizeMethod { none, sd, mad };

/// Per-column location/scale applied to produce a normalized dataset.
struct Normalization {
  NormalizeMethod method = NormalizeMethod::none;
  Vector center;
  Vector scale;
};

/// n×p observations, one row per observation.
struct Dataset {
  Matrix x;
  std::vector<std::string> names;
  std::optional<Normalization> normalization;

  Dataset() = default;
  explicit Dataset(Matrix values) : x(std::move(values)) {}

  Index n() const noexcept { return x.rows(); }
  Index p() const noexcept { return x.cols(); }
};

/// Adjusted MAD consistency constant for the normal distribution.
inline constexpr double kMadConstant = 1.4826;

double median(std::vector<double> v);
/// Unadjusted median absolute deviation about the median.
double raw_mad(const std::vector<double>& v);
std::vector<double> column(const Dataset& d, Index j);

}  // namespace rggm
