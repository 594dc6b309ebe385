#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "nkdelib/errors.hpp"

namespace nkd {

// Largest supported component count. Configurations are packed into a
// single 64-bit word.
inline constexpr int kMaxComponents = 64;

// Largest component count for which exhaustive 2^n enumeration is allowed.
inline constexpr int kMaxEnumerableComponents = 20;

/// A fixed-length binary solution vector.
///
/// Component 0 is the most significant bit of the packed word, so integer
/// order on `bits()` coincides with lexicographic order of the bit string
/// written component 0 first.
class Configuration {
 public:
  Configuration() = default;

  // All-zero configuration of length n.
  explicit Configuration(int n) : n_(checked_length(n)) {}

  Configuration(int n, std::uint64_t packed) : n_(checked_length(n)), bits_(packed & mask(n)) {}

  static Configuration from_string(std::string_view text) {
    Configuration c(static_cast<int>(text.size()));
    for (int i = 0; i < c.n_; ++i) {
      const char ch = text[static_cast<std::size_t>(i)];
      if (ch != '0' && ch != '1') throw ParameterError("configuration string must contain only 0 and 1");
      c.set(i, ch == '1');
    }
    return c;
  }

  int size() const { return n_; }
  std::uint64_t bits() const { return bits_; }

  bool operator[](int i) const { return (bits_ >> shift(i)) & 1U; }

  void set(int i, bool value) {
    const std::uint64_t b = std::uint64_t{1} << shift(i);
    bits_ = value ? (bits_ | b) : (bits_ & ~b);
  }

  Configuration flipped(int i) const {
    Configuration c = *this;
    c.bits_ ^= std::uint64_t{1} << shift(i);
    return c;
  }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(n_), '0');
    for (int i = 0; i < n_; ++i)
      if ((*this)[i]) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;
  // Lexicographic (component 0 first) within equal lengths.
  friend std::strong_ordering operator<=>(const Configuration& a, const Configuration& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

  static std::uint64_t mask(int n) {
    return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  }

 private:
  static int checked_length(int n) {
    if (n < 0 || n > kMaxComponents) throw ParameterError("configuration length must be in [0, 64]");
    return n;
  }
  int shift(int i) const { return n_ - 1 - i; }

  int n_ = 0;
  std::uint64_t bits_ = 0;
};

inline int hamming_distance(const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) throw DimensionError("hamming distance of configurations with different lengths");
  return __builtin_popcountll(a.bits() ^ b.bits());
}

}  // namespace nkd

template <>
struct std::hash<nkd::Configuration> {
  std::size_t operator()(const nkd::Configuration& c) const noexcept {
    return std::hash<std::uint64_t>{}(c.bits() ^ (static_cast<std::uint64_t>(c.size()) << 58));
  }
};
