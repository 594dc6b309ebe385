#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "nkdelib/configuration.hpp"
#include "nkdelib/landscape.hpp"

namespace nkd {

namespace detail {

template <class Visit>
void visit_flips(const Configuration& x, int first, int remaining, std::uint64_t mask, Visit& visit) {
  for (int i = first; i < x.size(); ++i) {
    const std::uint64_t m = mask | (std::uint64_t{1} << i);
    visit(Configuration(x.size(), x.bits() ^ m));
    if (remaining > 1) visit_flips(x, i + 1, remaining - 1, m, visit);
  }
}

inline void check_radius(const Configuration& x, int d) {
  if (d < 1 || d > x.size()) throw ParameterError("search radius must satisfy 1 <= d <= n");
}

}  // namespace detail

// Calls visit(y) once for every y with 1 <= hamming(x, y) <= d.
template <class Visit>
void for_each_neighbor(const Configuration& x, int d, Visit&& visit) {
  detail::check_radius(x, d);
  detail::visit_flips(x, 0, d, 0, visit);
}

// Hamming ball of radius d around x, excluding x, in ascending order.
inline std::vector<Configuration> neighborhood(const Configuration& x, int d) {
  std::vector<Configuration> out;
  for_each_neighbor(x, d, [&](const Configuration& y) { out.push_back(y); });
  std::sort(out.begin(), out.end());
  return out;
}

// Best neighbor within radius d if it strictly improves on x; ties between
// neighbors go to the lexicographically smallest.
template <class Evaluate>
std::optional<Configuration> steepest_step(const Configuration& x, Evaluate&& evaluate, int d) {
  const double here = evaluate(x);
  std::optional<Configuration> best;
  double best_value = here;
  for_each_neighbor(x, d, [&](const Configuration& y) {
    const double v = evaluate(y);
    if (!best) {
      if (v > here) {
        best = y;
        best_value = v;
      }
    } else if (v > best_value || (v == best_value && y < *best)) {
      best = y;
      best_value = v;
    }
  });
  return best;
}

/// Steepest-ascent hill climb from `start` until no configuration within
/// radius d is strictly better. Returns the visited path, start first and
/// the local peak last.
template <class Evaluate>
std::vector<Configuration> local_search_path(const Configuration& start, Evaluate&& evaluate, int d = 1) {
  std::vector<Configuration> path{start};
  while (auto next = steepest_step(path.back(), evaluate, d)) path.push_back(*next);
  return path;
}

template <class Evaluate>
Configuration local_search(const Configuration& start, Evaluate&& evaluate, int d = 1) {
  Configuration x = start;
  while (auto next = steepest_step(x, evaluate, d)) x = *next;
  return x;
}

// True iff no configuration within radius d is strictly better than x.
template <class Evaluate>
bool is_local_peak(const Configuration& x, Evaluate&& evaluate, int d = 1) {
  const double here = evaluate(x);
  bool peak = true;
  for_each_neighbor(x, d, [&](const Configuration& y) {
    if (peak && evaluate(y) > here) peak = false;
  });
  return peak;
}

/// Every local peak within radius d, by exhaustive scan over 2^n
/// configurations, in ascending order. Throws CapacityError when n > 20.
template <class Evaluate>
std::vector<Configuration> enumerate_local_peaks(Evaluate&& evaluate, int n, int d = 1) {
  if (n > kMaxEnumerableComponents) throw CapacityError("local peak enumeration needs n <= 20");
  if (n < 1) throw ParameterError("n must be positive");
  const FitnessTable table(n, evaluate);
  std::vector<Configuration> peaks;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    const Configuration x(n, b);
    if (is_local_peak(x, table, d)) peaks.push_back(x);
  }
  return peaks;
}

}  // namespace nkd
