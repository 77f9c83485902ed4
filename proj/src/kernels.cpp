#include "aztec/kernels.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace aztec {

bool TwoLineState::interlaced() const {
  if (x.size() != y.size() + 1) return false;
  for (size_t i = 0; i < y.size(); ++i) {
    if (!(x[i] <= y[i] && y[i] < x[i + 1])) return false;
  }
  return true;
}

const LatticeFunction& walk_distribution(unsigned long t) {
  static std::map<unsigned long, LatticeFunction> cache;
  auto it = cache.find(t);
  if (it == cache.end()) {
    std::vector<Rational> values(t + 1);
    const BigInt denom = pow2(t);
    for (unsigned long k = 0; k <= t; ++k)
      values[k] = rat(binomial(t, static_cast<long>(k)), denom);
    it = cache.emplace(t, LatticeFunction(0, std::move(values), true)).first;
  }
  return it->second;
}

namespace kernel {
namespace {

void require_state(const TwoLineState& s, const char* which) {
  if (s.x.size() != s.y.size() + 1)
    throw std::invalid_argument(std::string(which) + " state has mismatched line sizes");
  if (!s.interlaced())
    throw std::invalid_argument(std::string(which) + " state is not interlaced");
}

void require_increasing(std::span<const long> v, const char* which) {
  for (size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i] >= v[i + 1])
      throw std::invalid_argument(std::string(which) + " tuple is not strictly increasing");
}

// Runs fn on every tuple with values[i] in [lo[i], hi[i]].
template <typename Fn>
void for_each_in_box(const std::vector<long>& lo, const std::vector<long>& hi, Fn&& fn) {
  const size_t k = lo.size();
  for (size_t i = 0; i < k; ++i)
    if (lo[i] > hi[i]) return;
  std::vector<long> v(lo);
  while (true) {
    fn(v);
    size_t i = 0;
    while (i < k && v[i] == hi[i]) v[i] = lo[i], ++i;
    if (i == k) return;
    ++v[i];
  }
}

Matrix<Rational> raw_matrix(unsigned long t, const TwoLineState& from, const TwoLineState& to) {
  const size_t n = from.y.size();
  const auto& phi = walk_distribution(t);
  Matrix<Rational> m(2 * n + 1, 2 * n + 1);
  for (size_t i = 0; i <= n; ++i) {
    for (size_t j = 0; j <= n; ++j) m(i, j) = phi(to.x[j] - from.x[i]);
    for (size_t j = 0; j < n; ++j)
      m(i, n + 1 + j) = cumulative(phi, to.y[j] - from.x[i]) - (j >= i ? 1 : 0);
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= n; ++j)
      m(n + 1 + i, j) = phi(to.x[j] - from.y[i]) - phi(to.x[j] - from.y[i] - 1);
    for (size_t j = 0; j < n; ++j) m(n + 1 + i, n + 1 + j) = phi(to.y[j] - from.y[i]);
  }
  return m;
}

}  // namespace

Matrix<Rational> KernelMatrix::full() const {
  const size_t top = a.rows(), bottom = c.rows();
  Matrix<Rational> m(top + bottom, top + bottom);
  for (size_t i = 0; i < top; ++i) {
    for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
  }
  for (size_t i = 0; i < bottom; ++i) {
    for (size_t j = 0; j < c.cols(); ++j) m(top + i, j) = c(i, j);
    for (size_t j = 0; j < d.cols(); ++j) m(top + i, c.cols() + j) = d(i, j);
  }
  return m;
}

KernelMatrix assemble(unsigned long t, const TwoLineState& from, const TwoLineState& to) {
  require_state(from, "from");
  require_state(to, "to");
  if (from.y.size() != to.y.size()) throw std::invalid_argument("state sizes differ");
  const size_t n = from.y.size();
  auto m = raw_matrix(t, from, to);
  KernelMatrix k{t, Matrix<Rational>(n + 1, n + 1), Matrix<Rational>(n + 1, n),
                 Matrix<Rational>(n, n + 1), Matrix<Rational>(n, n)};
  for (size_t i = 0; i <= n; ++i) {
    for (size_t j = 0; j <= n; ++j) k.a(i, j) = m(i, j);
    for (size_t j = 0; j < n; ++j) k.b(i, j) = m(i, n + 1 + j);
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= n; ++j) k.c(i, j) = m(n + 1 + i, j);
    for (size_t j = 0; j < n; ++j) k.d(i, j) = m(n + 1 + i, n + 1 + j);
  }
  return k;
}

Rational q_raw(unsigned long t, const TwoLineState& from, const TwoLineState& to) {
  if (from.x.size() != to.x.size() || from.y.size() != to.y.size() ||
      from.x.size() != from.y.size() + 1)
    throw std::invalid_argument("state sizes differ");
  return determinant(raw_matrix(t, from, to));
}

Rational q(unsigned long t, const TwoLineState& from, const TwoLineState& to) {
  require_state(from, "from");
  require_state(to, "to");
  return q_raw(t, from, to);
}

Rational q_plus(unsigned long t, const TwoLineState& from, const TwoLineState& to) {
  return q(t, from, to) * rat(vandermonde(to.y), vandermonde(from.y));
}

Rational p(unsigned long t, std::span<const long> from, std::span<const long> to) {
  if (from.size() != to.size()) throw std::invalid_argument("tuple sizes differ");
  require_increasing(from, "from");
  require_increasing(to, "to");
  const size_t n = from.size();
  const auto& phi = walk_distribution(t);
  Matrix<Rational> m(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) m(i, j) = phi(to[j] - from[i]);
  return determinant(m);
}

Rational p_plus(unsigned long t, std::span<const long> from, std::span<const long> to) {
  return p(t, from, to) * rat(vandermonde(to), vandermonde(from));
}

std::vector<std::vector<long>> between(std::span<const long> x) {
  std::vector<std::vector<long>> out;
  if (x.empty()) return out;
  std::vector<long> lo(x.begin(), x.end() - 1), hi(x.begin() + 1, x.end());
  for (auto& h : hi) --h;
  for_each_in_box(lo, hi, [&](const std::vector<long>& y) { out.push_back(y); });
  return out;
}

Rational lambda(std::span<const long> x, std::span<const long> y) {
  if (x.size() != y.size() + 1) throw std::invalid_argument("tuple sizes differ");
  for (size_t i = 0; i < y.size(); ++i)
    if (!(x[i] <= y[i] && y[i] < x[i + 1]))
      throw std::invalid_argument("upper line is not between the lower-line points");
  return rat(factorial(static_cast<unsigned>(y.size())) * vandermonde(y), vandermonde(x));
}

Rational marginalize_x(unsigned long t, const TwoLineState& from, std::span<const long> y_to) {
  require_state(from, "from");
  if (y_to.size() != from.y.size()) throw std::invalid_argument("state sizes differ");
  const size_t n = y_to.size();
  // x'_i ranges over (y'_{i-1}, y'_i] intersected with the t-step reach.
  std::vector<long> lo(n + 1), hi(n + 1);
  for (size_t i = 0; i <= n; ++i) {
    lo[i] = from.x[i];
    if (i > 0) lo[i] = std::max(lo[i], y_to[i - 1] + 1);
    hi[i] = from.x[i] + static_cast<long>(t);
    if (i < n) hi[i] = std::min(hi[i], y_to[i]);
  }
  Rational sum = 0;
  TwoLineState to{{}, std::vector<long>(y_to.begin(), y_to.end())};
  for_each_in_box(lo, hi, [&](const std::vector<long>& xs) {
    to.x = xs;
    sum += q_plus(t, from, to);
  });
  return sum;
}

std::pair<Rational, Rational> intertwine_check(unsigned long t, std::span<const long> x,
                                               const TwoLineState& to) {
  require_increasing(x, "lower line");
  require_state(to, "to");
  Rational lhs = 0;
  for (const auto& y : between(x)) {
    TwoLineState from{std::vector<long>(x.begin(), x.end()), y};
    lhs += lambda(x, y) * q_plus(t, from, to);
  }
  Rational rhs = p_plus(t, x, to.x) * lambda(to.x, to.y);
  return {lhs, rhs};
}

std::pair<Rational, Rational> recursion_check(unsigned long t, const TwoLineState& from,
                                              const TwoLineState& to) {
  Rational lhs = q(t + 1, from, to);
  const size_t n = from.y.size(), k = 2 * n + 1;
  Rational rhs = 0;
  for (unsigned long mask = 0; mask < (1ul << k); ++mask) {
    TwoLineState displaced = from;
    for (size_t i = 0; i <= n; ++i) displaced.x[i] += (mask >> i) & 1;
    for (size_t i = 0; i < n; ++i) displaced.y[i] += (mask >> (n + 1 + i)) & 1;
    rhs += q_raw(t, displaced, to);
  }
  rhs /= rat(pow2(k));
  return {lhs, rhs};
}

std::vector<TwoLineState> reachable(unsigned long t, const TwoLineState& from) {
  require_state(from, "from");
  const size_t n = from.y.size();
  std::vector<long> lo(from.x), hi(from.x);
  lo.insert(lo.end(), from.y.begin(), from.y.end());
  hi.insert(hi.end(), from.y.begin(), from.y.end());
  for (auto& h : hi) h += static_cast<long>(t);
  std::vector<TwoLineState> out;
  for_each_in_box(lo, hi, [&](const std::vector<long>& v) {
    TwoLineState s{{v.begin(), v.begin() + n + 1}, {v.begin() + n + 1, v.end()}};
    if (s.interlaced()) out.push_back(std::move(s));
  });
  return out;
}

std::vector<std::vector<long>> reachable_line(unsigned long t, std::span<const long> from) {
  require_increasing(from, "from");
  std::vector<long> lo(from.begin(), from.end()), hi(lo);
  for (auto& h : hi) h += static_cast<long>(t);
  std::vector<std::vector<long>> out;
  for_each_in_box(lo, hi, [&](const std::vector<long>& v) {
    for (size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i] >= v[i + 1]) return;
    out.push_back(v);
  });
  return out;
}

}  // namespace kernel

std::vector<Filling> enumerate_fillings(std::span<const long> top) {
  kernel::require_increasing(top, "top line");
  std::vector<Filling> out;
  if (top.empty()) return {Filling{}};
  if (top.size() == 1) return {Filling{{top[0]}}};
  for (const auto& y : kernel::between(top)) {
    for (auto& partial : enumerate_fillings(y)) {
      partial.emplace_back(top.begin(), top.end());
      out.push_back(std::move(partial));
    }
  }
  return out;
}

BigInt filling_count(std::span<const long> top) {
  kernel::require_increasing(top, "top line");
  BigInt denom = 1;
  for (unsigned k = 1; k + 1 <= top.size(); ++k) denom *= factorial(k);
  BigInt h = vandermonde(top);
  BigInt count;
  mpz_divexact(count.get_mpz_t(), h.get_mpz_t(), denom.get_mpz_t());
  return count;
}

}  // namespace aztec
