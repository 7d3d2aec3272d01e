#pragma once

#include <stdexcept>
#include <string>

namespace sgcca {

/// Invalid input: bad shapes, malformed files, out-of-range parameters.
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced a result that violates its own postcondition.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw input_error(what);
}

}  // namespace detail
}  // namespace sgcca
