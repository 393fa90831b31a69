#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace cuberisk {

using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_100;

// Ceiling of a high-precision value as an exact integer.
inline BigInt big_ceil(const BigFloat& v) {
  return BigInt(boost::multiprecision::ceil(v));
}

}  // namespace cuberisk
