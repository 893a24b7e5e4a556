#pragma once

#include <optional>
#include <span>

namespace clonescope::stats {

// Arithmetic mean; nullopt for an empty sample.
std::optional<double> mean(std::span<const double> values);

// Sample standard deviation (n - 1 denominator); nullopt when n < 2.
std::optional<double> sample_sd(std::span<const double> values);

// Quantile by linear interpolation between order statistics
// (Hyndman & Fan type 7). `values` need not be sorted.
std::optional<double> quantile(std::span<const double> values, double p);

inline std::optional<double> median(std::span<const double> values) {
  return quantile(values, 0.5);
}

// Q3 - Q1 under the same convention.
std::optional<double> iqr(std::span<const double> values);

}  // namespace clonescope::stats
