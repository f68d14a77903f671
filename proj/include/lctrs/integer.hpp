#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace lctrs {

using Integer = boost::multiprecision::cpp_int;

/// Remainder in [0, |d|), the SMT-LIB convention for `mod`. d must be non-zero.
inline Integer euclid_mod(const Integer& n, const Integer& d) {
  Integer r = n % d;  // truncated: sign follows n
  if (r < 0) r += abs(d);
  return r;
}

/// Quotient q with n = d*q + euclid_mod(n, d). d must be non-zero.
inline Integer euclid_div(const Integer& n, const Integer& d) {
  return (n - euclid_mod(n, d)) / d;
}

inline std::string to_string(const Integer& n) { return n.str(); }

}  // namespace lctrs
