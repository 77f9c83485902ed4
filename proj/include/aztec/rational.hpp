#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>

namespace aztec {

// Exact arbitrary-precision arithmetic.  mpq_class values produced by the
// helpers below are always canonical: lowest terms, positive denominator.
// GMP keeps arithmetic on canonical operands canonical, so library code can
// compare rationals with == directly.
using BigInt = mpz_class;
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational rat(const BigInt& num, const BigInt& den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline BigInt factorial(unsigned n) {
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

inline BigInt binomial(unsigned long n, long k) {
  if (k < 0 || static_cast<unsigned long>(k) > n) return BigInt(0);
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, static_cast<unsigned long>(k));
  return r;
}

// 2^n as a bigint (n >= 0).
inline BigInt pow2(unsigned long n) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, n);
  return r;
}

// Product of (x_j - x_i) over i < j.  Zero iff two entries coincide.
BigInt vandermonde(std::span<const long> xs);

}  // namespace aztec
