#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "nkdelib/rng.hpp"

namespace nkd {

struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool contains(double v) const { return low <= v && v <= high; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

double mean(std::span<const double> xs);

// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> xs);

// Type-7 quantile of an ascending-sorted sample.
double sorted_quantile(std::span<const double> sorted, double q);

/// Percentile bootstrap interval for an arbitrary statistic of n jointly
/// resampled units. `statistic` receives the resampled unit indices.
template <class Statistic>
Interval bootstrap_interval(std::size_t n, int resamples, double confidence, std::uint64_t seed,
                            Statistic&& statistic) {
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  for (auto& s : stats) {
    for (auto& i : idx) i = static_cast<std::size_t>(uniform_index(rng, n));
    s = statistic(std::span<const std::size_t>(idx));
  }
  std::sort(stats.begin(), stats.end());
  const double tail = (1.0 - confidence) / 2.0;
  return {sorted_quantile(stats, tail), sorted_quantile(stats, 1.0 - tail)};
}

// Percentile bootstrap interval for the mean, widened if necessary so that
// it always contains the sample mean.
Interval bootstrap_mean_ci(std::span<const double> xs, int resamples, double confidence, std::uint64_t seed);

struct PairedTest {
  double mean_difference = 0.0;
  // P(mean difference >= observed) under the null of zero mean, estimated
  // by resampling the centered differences; (hits + 1) / (resamples + 1).
  double p_value = 1.0;
  Interval ci;
};

// One-sided paired bootstrap test of mean(differences) > 0.
PairedTest paired_bootstrap_test(std::span<const double> differences, int resamples, double confidence,
                                 std::uint64_t seed);

}  // namespace nkd
