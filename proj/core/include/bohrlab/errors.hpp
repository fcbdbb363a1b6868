#pragma once

#include <stdexcept>
#include <string>

namespace bohrlab {

/// Parameters outside their documented range. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A request that would exceed an enumeration or memory ceiling. Exit code 3.
class CapacityError : public std::length_error {
 public:
  explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace bohrlab
