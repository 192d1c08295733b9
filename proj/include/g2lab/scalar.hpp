#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace g2lab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Raised when an exact computation needs an irrational value
/// (square root or odd root of a non-perfect power).
class InexactError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Exact, Double };

inline const char *to_string(Mode m) { return m == Mode::Exact ? "exact" : "double"; }

template <class S> struct ScalarTraits;

template <> struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static bool is_zero(double x) { return x == 0.0; }
  static double to_double(double x) { return x; }
  static double abs(double x) { return std::fabs(x); }
  static double root(double x, int n) {
    if (n % 2 == 0 && x < 0) throw std::domain_error("even root of negative number");
    return x < 0 ? -std::pow(-x, 1.0 / n) : std::pow(x, 1.0 / n);
  }
  static std::string to_string(double x);
};

namespace detail {

// Largest r with r^n <= x, x >= 0.
inline BigInt integer_root(const BigInt &x, int n) {
  if (x < 2) return x;
  BigInt lo = 0, hi = 1;
  while (boost::multiprecision::pow(hi, n) <= x) hi <<= 1;
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) >> 1;
    if (boost::multiprecision::pow(mid, n) <= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

} // namespace detail

template <> struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational &x) { return x == 0; }
  static double to_double(const Rational &x) { return x.convert_to<double>(); }
  static Rational abs(const Rational &x) { return x < 0 ? Rational(-x) : x; }

  /// Exact n-th root; throws InexactError if x is not a perfect n-th power.
  static Rational root(const Rational &x, int n) {
    if (x < 0) {
      if (n % 2 == 0) throw std::domain_error("even root of negative number");
      return -root(-x, n);
    }
    BigInt num = boost::multiprecision::numerator(x);
    BigInt den = boost::multiprecision::denominator(x);
    BigInt rn = detail::integer_root(num, n);
    BigInt rd = detail::integer_root(den, n);
    if (boost::multiprecision::pow(rn, n) != num || boost::multiprecision::pow(rd, n) != den)
      throw InexactError("value " + x.str() + " has no rational root of order " + std::to_string(n));
    return Rational(rn, rd);
  }
  static std::string to_string(const Rational &x) { return x.str(); }
};

inline std::string ScalarTraits<double>::to_string(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class S> double to_double(const S &x) { return ScalarTraits<S>::to_double(x); }

} // namespace g2lab
