#include "nkdelib/stats.hpp"

#include <cmath>
#include <numeric>

#include "nkdelib/errors.hpp"

namespace nkd {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw StateError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw StateError("quantile of an empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

// Bootstrap distribution of the mean, sorted.
std::vector<double> resampled_means(std::span<const double> xs, int resamples, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = xs.size();
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += xs[static_cast<std::size_t>(uniform_index(rng, n))];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  return means;
}

}  // namespace

Interval bootstrap_mean_ci(std::span<const double> xs, int resamples, double confidence, std::uint64_t seed) {
  if (xs.empty()) throw StateError("bootstrap of an empty sample");
  if (resamples < 1) throw ParameterError("bootstrap needs at least one resample");
  const auto means = resampled_means(xs, resamples, seed);
  const double tail = (1.0 - confidence) / 2.0;
  const double mu = mean(xs);
  return {std::min(sorted_quantile(means, tail), mu), std::max(sorted_quantile(means, 1.0 - tail), mu)};
}

PairedTest paired_bootstrap_test(std::span<const double> differences, int resamples, double confidence,
                                 std::uint64_t seed) {
  if (differences.empty()) throw StateError("paired test of an empty sample");
  if (resamples < 1) throw ParameterError("bootstrap needs at least one resample");
  PairedTest out;
  out.mean_difference = mean(differences);
  out.ci = bootstrap_mean_ci(differences, resamples, confidence, seed);

  std::vector<double> centered(differences.begin(), differences.end());
  for (double& d : centered) d -= out.mean_difference;
  const auto null_means = resampled_means(centered, resamples, substream_seed(seed, 1));
  const auto first_hit =
      std::lower_bound(null_means.begin(), null_means.end(), out.mean_difference);
  const auto hits = static_cast<double>(null_means.end() - first_hit);
  out.p_value = (hits + 1.0) / (static_cast<double>(resamples) + 1.0);
  return out;
}

}  // namespace nkd
