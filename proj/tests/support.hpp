#pragma once

#include <optional>

#include "skewlab/types.hpp"

namespace skewlab::testing {

// Code of the skewlab::Error thrown by f, or nullopt if it returns normally.
template <typename F>
std::optional<ErrorCode> error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace skewlab::testing
