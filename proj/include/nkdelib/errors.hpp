#pragma once

#include <stdexcept>
#include <string>

namespace nkd {

// Invalid argument value or inconsistent parameter combination.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration length does not match the landscape.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exhaustive enumeration requested on a space that is too large.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Operation called on an object in an unusable state (e.g. empty trace).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nkd
