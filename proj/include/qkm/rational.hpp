#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <string>

namespace qkm {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int int_gcd(const Int& a, const Int& b) { return Int(gcd(a, b)); }
inline Int int_lcm(const Int& a, const Int& b) { return Int(lcm(a, b)); }

inline Rat rat_of(long long n) { return Rat(n); }
inline Rat rat_of(long long n, long long d) { return Rat(n, d); }

inline bool rat_is_integer(const Rat& r) { return denominator(r) == 1; }

// "p" or "p/q", q > 0, reduced (cpp_rational keeps this normal form).
inline std::string rat_string(const Rat& r) {
  Int n = numerator(r), d = denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

}  // namespace qkm
