#pragma once

#include <span>
#include <vector>

#include "aztec/rational.hpp"

namespace aztec {

// A finitely supported function Z -> Q, stored densely on a contiguous
// window [lo, lo + size).  Reads outside the window return 0.  The
// probability flag marks mass functions (nonnegative, total mass 1) and is
// preserved by convolution; differences clear it.
class LatticeFunction {
 public:
  LatticeFunction() = default;
  LatticeFunction(long lo, std::vector<Rational> values, bool probability = false);

  // delta_{at}: unit mass at a single point.
  static LatticeFunction dirac(long at);

  long lo() const { return lo_; }
  long hi() const { return lo_ + static_cast<long>(values_.size()) - 1; }  // inclusive
  bool empty() const { return values_.empty(); }
  bool is_probability() const { return probability_; }

  // Value at x (0 outside the stored window).
  const Rational& operator()(long x) const;

  Rational total_mass() const;

  // Drops zero entries at both ends of the window.
  LatticeFunction trimmed() const;

  bool operator==(const LatticeFunction& other) const;

 private:
  long lo_ = 0;
  std::vector<Rational> values_;
  bool probability_ = false;
};

// One fair Bernoulli step: mass 1/2 at 0 and 1/2 at 1.
LatticeFunction bernoulli_step();

// (f * g)(x) = sum_{s+t=x} f(s) g(t).
LatticeFunction convolve(const LatticeFunction& f, const LatticeFunction& g);

// f^{*n}; n = 0 gives dirac(0).  Iterated convolution, not a closed form —
// tests cross-check against the binomial expression for bernoulli_step.
LatticeFunction convolution_power(const LatticeFunction& f, unsigned n);

// (Δf)(x) = f(x) - f(x-1).
LatticeFunction backward_difference(const LatticeFunction& f);

// (Δ̄f)(x) = f(x+1) - f(x).
LatticeFunction forward_difference(const LatticeFunction& f);

// Σ_{y <= x} f(y): right inverse of the backward difference.
Rational cumulative(const LatticeFunction& f, long x);

// Σ_{y <= x-1} f(y): right inverse of the forward difference up to sign
// (Δ̄ applied to this sum reproduces f).
Rational cumulative_strict(const LatticeFunction& f, long x);

}  // namespace aztec
