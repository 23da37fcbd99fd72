#pragma once

#include <stdexcept>
#include <string>

namespace ucontract {

/// Precondition violated by a caller-supplied value.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem size exceeds a configured cap.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical routine failed to reach its accuracy contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace ucontract
