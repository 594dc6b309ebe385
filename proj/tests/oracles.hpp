#pragma once

// Brute-force reference implementations used only by tests. They work on
// bit strings and re-read contribution tables directly, sharing no code
// with the library's evaluation or search paths.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nkdelib/landscape.hpp"

namespace oracle {

inline std::string bits_of(std::uint64_t value, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = n - 1; i >= 0; --i, value >>= 1)
    if (value & 1U) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

inline std::vector<std::string> all_strings(int n) {
  std::vector<std::string> out;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) out.push_back(bits_of(v, n));
  return out;
}

inline int distance(const std::string& a, const std::string& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Mean over components of the table entry addressed by the string
// "own bit" + "neighbor bits", read as a base-2 number.
inline double fitness(const nkd::NKLandscape& L, const std::string& x) {
  double total = 0.0;
  for (int i = 0; i < L.n(); ++i) {
    std::string key(1, x[static_cast<std::size_t>(i)]);
    for (int j : L.neighbors()[static_cast<std::size_t>(i)]) key += x[static_cast<std::size_t>(j)];
    total += L.tables()[static_cast<std::size_t>(i)][std::stoul(key, nullptr, 2)];
  }
  return total / L.n();
}

using StringEval = std::function<double(const std::string&)>;

inline std::vector<std::string> neighborhood(const std::string& x, int d) {
  std::vector<std::string> out;
  for (const auto& y : all_strings(static_cast<int>(x.size()))) {
    const int dist = distance(x, y);
    if (dist >= 1 && dist <= d) out.push_back(y);
  }
  return out;
}

inline bool is_peak(const StringEval& eval, const std::string& x, int d) {
  const double v = eval(x);
  for (const auto& y : neighborhood(x, d))
    if (eval(y) > v) return false;
  return true;
}

// Single-flip peak count by direct scan over all strings.
inline int peak_count_d1(const nkd::NKLandscape& L) {
  int peaks = 0;
  for (const auto& x : all_strings(L.n())) {
    const double v = fitness(L, x);
    bool peak = true;
    for (int i = 0; i < L.n() && peak; ++i) {
      std::string y = x;
      y[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] == '0' ? '1' : '0';
      if (fitness(L, y) > v) peak = false;
    }
    peaks += peak;
  }
  return peaks;
}

// Argmax with ties to the lexicographically smallest string.
inline std::pair<std::string, double> argmax(const std::vector<std::string>& candidates, const StringEval& eval) {
  std::string best;
  double best_value = -1.0;
  for (const auto& x : candidates) {
    const double v = eval(x);
    if (best.empty() || v > best_value || (v == best_value && x < best)) {
      best = x;
      best_value = v;
    }
  }
  return {best, best_value};
}

inline std::pair<std::string, double> global_optimum(const nkd::NKLandscape& L) {
  return argmax(all_strings(L.n()), [&](const std::string& x) { return fitness(L, x); });
}

// Single-flip steepest ascent on strings, ties to the smallest string.
inline std::string climb(const StringEval& eval, std::string x) {
  while (true) {
    std::vector<std::string> flips;
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::string y = x;
      y[i] = y[i] == '0' ? '1' : '0';
      flips.push_back(y);
    }
    const auto [best, value] = argmax(flips, eval);
    if (!(value > eval(x))) return x;
    x = best;
  }
}

}  // namespace oracle
