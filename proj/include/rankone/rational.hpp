#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace rankone {

/// Exact rational scalar used for every measure in the library.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

/// "p/q" (or "p" when q == 1).
std::string to_string(const Rational& r);

double to_double(const Rational& r);

/// Parses "p/q", an integer, or a finite decimal such as "2.83" exactly.
Rational parse_rational(std::string_view text);

/// Largest integer <= r.
std::int64_t floor_to_int(const Rational& r);

}  // namespace rankone
