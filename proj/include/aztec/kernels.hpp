#pragma once

#include <span>
#include <utility>
#include <vector>

#include "aztec/lattice.hpp"
#include "aztec/linalg.hpp"
#include "aztec/rational.hpp"

namespace aztec {

// Positions of two adjacent particle lines: n+1 points on the lower line (x)
// and n on the upper (y), interlaced as x_1 <= y_1 < x_2 <= ... <= y_n < x_{n+1}.
struct TwoLineState {
  std::vector<long> x;
  std::vector<long> y;

  size_t n() const { return y.size(); }
  bool interlaced() const;

  auto operator<=>(const TwoLineState&) const = default;
};

// t-step distribution of a single walk taking fair {0,1} steps: the binomial
// mass 2^{-t} C(t,k) on k = 0..t.  Cached per t.
const LatticeFunction& walk_distribution(unsigned long t);

namespace kernel {

// The t-step two-line weight is the determinant of a (2n+1)x(2n+1) matrix
// laid out in blocks [[A,B],[C,D]].  Rows are indexed by the components of
// the source state (x_1..x_{n+1}, then y_1..y_n), columns by the components
// of the target state, so with phi the one-walk step distribution:
//   A_ij = phi^{(t)}(x'_j - x_i)
//   B_ij = (sum of phi^{(t)} up to y'_j - x_i) - 1{j >= i}
//   C_ij = phi^{(t)}(x'_j - y_i) - phi^{(t)}(x'_j - y_i - 1)
//   D_ij = phi^{(t)}(y'_j - y_i)
struct KernelMatrix {
  unsigned long t = 0;
  Matrix<Rational> a, b, c, d;

  // The (2n+1)x(2n+1) block matrix [[A,B],[C,D]].
  Matrix<Rational> full() const;
};

// Builds the blocks; throws on dimension mismatch or interlacing violation.
KernelMatrix assemble(unsigned long t, const TwoLineState& from, const TwoLineState& to);

// The determinant formula evaluated with no state-space checks.  The
// recursion and boundary identities below hold for it as an algebraic
// function, including at arguments outside the interlaced set.
Rational q_raw(unsigned long t, const TwoLineState& from, const TwoLineState& to);

// Substochastic transition kernel of the two-line walk killed when the upper
// line self-intersects.  Both states must be interlaced.
Rational q(unsigned long t, const TwoLineState& from, const TwoLineState& to);

// Stochastic kernel of the two-line walk conditioned to survive: q reweighted
// by the ratio of upper-line difference products.
Rational q_plus(unsigned long t, const TwoLineState& from, const TwoLineState& to);

// Killed n-walk kernel det[phi^{(t)}(to_j - from_i)] (non-intersecting-path
// determinant) and its conditioned-to-survive reweighting.  Both tuples must
// be strictly increasing.
Rational p(unsigned long t, std::span<const long> from, std::span<const long> to);
Rational p_plus(unsigned long t, std::span<const long> from, std::span<const long> to);

// All positions available to an upper line between fixed lower-line points:
// the product of the ranges x_i <= y_i < x_{i+1}.
std::vector<std::vector<long>> between(std::span<const long> x);

// Probability of upper line y when it is drawn uniformly among the fillings
// between the points of x: n! h(y)/h(x) with h the difference product.
// Throws when y is not between x.  Sums to 1 over between(x).
Rational lambda(std::span<const long> x, std::span<const long> y);

// Sum of q_plus(t, from, (x', y')) over every lower line x' interlacing with
// y'; equals p_plus(t, from.y, y').
Rational marginalize_x(unsigned long t, const TwoLineState& from, std::span<const long> y_to);

// Both sides of the intertwining identity
//   sum_{y between x} lambda(x,y) q_plus(t,(x,y),to)
//     = p_plus(t, x, to.x) lambda(to.x, to.y).
std::pair<Rational, Rational> intertwine_check(unsigned long t, std::span<const long> x,
                                               const TwoLineState& to);

// Both sides of the one-step recursion: q(t+1, from, to) against the average
// of q_raw(t, from + e, to) over all 0/1 displacement vectors e of the source
// components.
std::pair<Rational, Rational> recursion_check(unsigned long t, const TwoLineState& from,
                                              const TwoLineState& to);

// Interlaced states reachable in t steps (every coordinate moves by 0..t).
std::vector<TwoLineState> reachable(unsigned long t, const TwoLineState& from);

// Strictly increasing tuples reachable in t steps by n walks started at from.
std::vector<std::vector<long>> reachable_line(unsigned long t, std::span<const long> from);

}  // namespace kernel

// Triangular arrays of lines 1..n (line j holds j strictly increasing
// positions, consecutive lines interlaced as in TwoLineState) with line n
// equal to `top`.
using Filling = std::vector<std::vector<long>>;
std::vector<Filling> enumerate_fillings(std::span<const long> top);

// Number of such arrays: h(top) / prod_{k<n} k!.
BigInt filling_count(std::span<const long> top);

}  // namespace aztec
