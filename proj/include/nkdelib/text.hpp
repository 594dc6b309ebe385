#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "nkdelib/errors.hpp"

namespace nkd {

// Shortest decimal form that parses back to the same double.
inline std::string format_real(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline double parse_real(std::string_view text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ParameterError("not a real number: '" + std::string(text) + "'");
  return v;
}

inline int parse_int(std::string_view text) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ParameterError("not an integer: '" + std::string(text) + "'");
  return v;
}

}  // namespace nkd
