#pragma once

// Unbounded integer and rational types plus the few number-theoretic helpers
// shared by the geometry, chord and surface modules.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace hormonica {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer abs(const Integer& x) { return x < 0 ? Integer(-x) : x; }

inline Integer gcd(const Integer& a, const Integer& b) {
  return boost::multiprecision::gcd(abs(a), abs(b));
}

inline Integer gcd(const Integer& a, const Integer& b, const Integer& c) {
  return gcd(gcd(a, b), c);
}

// Floor division and non-negative remainder (cpp_int truncates toward zero).
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Integer mod_floor(const Integer& a, const Integer& b) {
  return a - b * floor_div(a, b);
}

struct ExtendedGcd {
  Integer g;  // non-negative
  Integer x;
  Integer y;  // a*x + b*y == g
};

inline ExtendedGcd extended_gcd(const Integer& a, const Integer& b) {
  Integer old_r = a, r = b;
  Integer old_x = 1, x = 0;
  Integer old_y = 0, y = 1;
  while (r != 0) {
    Integer q = old_r / r;
    std::tie(old_r, r) = std::make_tuple(r, Integer(old_r - q * r));
    std::tie(old_x, x) = std::make_tuple(x, Integer(old_x - q * x));
    std::tie(old_y, y) = std::make_tuple(y, Integer(old_y - q * y));
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_x = -old_x;
    old_y = -old_y;
  }
  return {old_r, old_x, old_y};
}

struct PrimePower {
  Integer prime;
  unsigned exponent = 0;
};

// Trial division; inputs are instrument-scale.
inline std::vector<PrimePower> factorize(Integer n) {
  std::vector<PrimePower> out;
  n = abs(n);
  for (Integer p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    PrimePower pp{p, 0};
    while (n % p == 0) {
      n /= p;
      ++pp.exponent;
    }
    out.push_back(pp);
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline Integer pow(const Integer& base, unsigned e) {
  Integer r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

inline std::string to_string(const Integer& x) { return x.str(); }

inline double to_double(const Integer& x) { return x.convert_to<double>(); }

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline std::int64_t to_int64(const Integer& x) { return x.convert_to<std::int64_t>(); }

}  // namespace hormonica
