#ifndef JETCARTAN_RATIONAL_HPP
#define JETCARTAN_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

namespace jc {

// Exact rational scalar. cpp_rational keeps itself in lowest terms.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

inline int cmp(const Rational& a, const Rational& b) {
  return a < b ? -1 : (a == b ? 0 : 1);
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace jc

#endif
