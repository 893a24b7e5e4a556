#include "clonescope/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace clonescope::stats {

std::optional<double> mean(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  // Running mean keeps the partial values in range for large samples.
  double m = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    ++n;
    m += (v - m) / static_cast<double>(n);
  }
  return m;
}

std::optional<double> sample_sd(std::span<const double> values) {
  if (values.size() < 2) return std::nullopt;
  // Welford.
  double m = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    ++n;
    const double delta = v - m;
    m += delta / static_cast<double>(n);
    m2 += delta * (v - m);
  }
  return std::sqrt(m2 / static_cast<double>(n - 1));
}

std::optional<double> quantile(std::span<const double> values, double p) {
  if (values.empty()) return std::nullopt;
  std::vector<double> v(values.begin(), values.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double lower = v[lo];
  if (hi == lo) return lower;
  const double upper = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return lower + (h - static_cast<double>(lo)) * (upper - lower);
}

std::optional<double> iqr(std::span<const double> values) {
  auto q1 = quantile(values, 0.25);
  auto q3 = quantile(values, 0.75);
  if (!q1 || !q3) return std::nullopt;
  return *q3 - *q1;
}

}  // namespace clonescope::stats
