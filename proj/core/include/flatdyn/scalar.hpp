#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "flatdyn/error.hpp"

namespace flatdyn {

// Two scalar backends, selected per computation:
//   Rational - exact arbitrary-precision rationals (GMP via boost).
//   double / BigFloat - binary floats; comparisons carry an epsilon and
//     predicates may come back "uncertain" instead of lying.
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;
using BigFloat = boost::multiprecision::mpfr_float; // runtime precision

enum class Sign { negative = -1, zero = 0, positive = 1, uncertain = 2 };

inline bool sign_known(Sign s) { return s != Sign::uncertain; }

template <class S> struct scalar_traits;

template <> struct scalar_traits<Rational> {
  static constexpr bool is_exact = true;
  static const char* name() { return "rational"; }

  static Sign sign(const Rational& x) {
    int s = x.sign();
    return s < 0 ? Sign::negative : (s > 0 ? Sign::positive : Sign::zero);
  }
  static Rational epsilon() { return Rational(0); }
  static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static BigInt floor(const Rational& x) {
    BigInt q = numerator(x) / denominator(x);
    if (x < 0 && q * denominator(x) != numerator(x)) --q;
    return q;
  }
  static Rational from_rational(const Rational& x) { return x; }

  // Transcendentals are outside the rational backend's capability except at
  // the arguments where they are rational anyway.
  static Rational exp(const Rational& x) {
    if (x == 0) return Rational(1);
    fail(Errc::backend, "exp() unavailable on the rational backend");
  }
  static Rational log(const Rational& x) {
    if (x == 1) return Rational(0);
    fail(Errc::backend, "log() unavailable on the rational backend");
  }
  static Rational cos(const Rational& x) {
    if (x == 0) return Rational(1);
    fail(Errc::backend, "cos() unavailable on the rational backend");
  }
  static Rational sin(const Rational& x) {
    if (x == 0) return Rational(0);
    fail(Errc::backend, "sin() unavailable on the rational backend");
  }
  static Rational sqrt(const Rational& x) {
    BigInt n = boost::multiprecision::sqrt(numerator(x));
    BigInt d = boost::multiprecision::sqrt(denominator(x));
    if (n * n == numerator(x) && d * d == denominator(x)) return Rational(n, d);
    fail(Errc::backend, "sqrt() of a non-square on the rational backend");
  }
};

template <> struct scalar_traits<double> {
  static constexpr bool is_exact = false;
  static const char* name() { return "float53"; }

  // Comparison tolerance; 1e-9 unless reconfigured.
  static double& epsilon() {
    static double eps = 1e-9;
    return eps;
  }
  static Sign sign(double x) {
    // an exact 0 means the computed values coincide bit for bit; only a
    // tiny nonzero residue is ambiguous
    if (x == 0) return Sign::zero;
    if (std::abs(x) < epsilon()) return Sign::uncertain;
    return x < 0 ? Sign::negative : Sign::positive;
  }
  static double abs(double x) { return std::abs(x); }
  static double to_double(double x) { return x; }
  static BigInt floor(double x) { return BigInt(std::floor(x)); }
  static double from_rational(const Rational& x) { return x.convert_to<double>(); }
  static double exp(double x) { return std::exp(x); }
  static double log(double x) { return std::log(x); }
  static double cos(double x) { return std::cos(x); }
  static double sin(double x) { return std::sin(x); }
  static double sqrt(double x) { return std::sqrt(x); }
};

template <> struct scalar_traits<BigFloat> {
  static constexpr bool is_exact = false;
  static const char* name() { return "bigfloat"; }

  // Default tolerance scales with the working precision: roughly 80% of the
  // mantissa is trusted. Overridable.
  static BigFloat& epsilon() {
    static BigFloat eps = [] {
      BigFloat e(10);
      unsigned digits = BigFloat::default_precision();
      return BigFloat(pow(e, -static_cast<int>(digits * 4 / 5)));
    }();
    return eps;
  }
  static Sign sign(const BigFloat& x) {
    if (x == 0) return Sign::zero;
    if (boost::multiprecision::abs(x) < epsilon()) return Sign::uncertain;
    return x < 0 ? Sign::negative : Sign::positive;
  }
  static BigFloat abs(const BigFloat& x) { return boost::multiprecision::abs(x); }
  static double to_double(const BigFloat& x) { return x.convert_to<double>(); }
  static BigInt floor(const BigFloat& x) {
    return BigInt(boost::multiprecision::floor(x).convert_to<BigInt>());
  }
  static BigFloat from_rational(const Rational& x) {
    return BigFloat(numerator(x)) / BigFloat(denominator(x));
  }
  static BigFloat exp(const BigFloat& x) { return boost::multiprecision::exp(x); }
  static BigFloat log(const BigFloat& x) { return boost::multiprecision::log(x); }
  static BigFloat cos(const BigFloat& x) { return boost::multiprecision::cos(x); }
  static BigFloat sin(const BigFloat& x) { return boost::multiprecision::sin(x); }
  static BigFloat sqrt(const BigFloat& x) { return boost::multiprecision::sqrt(x); }
};

// Sign with the sure/unsure distinction collapsed: throws on uncertain.
template <class S> int sign_or_fail(const S& x, const char* what) {
  Sign s = scalar_traits<S>::sign(x);
  if (s == Sign::uncertain)
    fail(Errc::uncertain, std::string("comparison within epsilon in ") + what);
  return s == Sign::zero ? 0 : (s == Sign::negative ? -1 : 1);
}

// "Is x zero" as a trilean: exact backends answer exactly, float backends
// answer uncertain inside the epsilon band and definitely-no outside.
template <class S> Sign zero_test(const S& x) {
  Sign s = scalar_traits<S>::sign(x);
  if constexpr (scalar_traits<S>::is_exact)
    return s == Sign::zero ? Sign::zero : s;
  else
    return s; // uncertain doubles as "possibly zero"
}

// Configure the BigFloat working precision (bits), returning digits10 used.
inline unsigned set_bigfloat_precision_bits(unsigned bits) {
  unsigned digits10 = static_cast<unsigned>(bits * 0.30103) + 1;
  BigFloat::default_precision(digits10);
  return digits10;
}

} // namespace flatdyn
