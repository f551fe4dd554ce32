#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <sstream>
#include <string>

namespace cachedof {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

// Exact rational value of a finite double (every finite double is rational).
inline Rational rational_from_double(double x) {
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
  long long mant = static_cast<long long>(std::ldexp(m, 53));
  exp -= 53;
  Rational q(mant);
  if (exp >= 0) {
    q *= Rational(BigInt(1) << exp);
  } else {
    q /= Rational(BigInt(1) << -exp);
  }
  return q;
}

}  // namespace cachedof
