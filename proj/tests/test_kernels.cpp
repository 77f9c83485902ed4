#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "aztec/kernels.hpp"

using namespace aztec;

namespace oracle {

// One step of the killed two-line walk for n = 1 (a single upper walk cannot
// collide, so nothing is ever killed): upper moves by its coin, then each
// lower walk moves by its coin and is pushed off the forbidden positions.
// Exhausts the 8 coin outcomes and tallies the resulting states.
std::map<TwoLineState, Rational> one_upper_step(const TwoLineState& s) {
  std::map<TwoLineState, Rational> dist;
  for (int beta = 0; beta <= 1; ++beta)
    for (int a1 = 0; a1 <= 1; ++a1)
      for (int a2 = 0; a2 <= 1; ++a2) {
        long y = s.y[0] + beta;
        long x1 = s.x[0] + a1;
        if (x1 == y + 1) --x1;
        long x2 = s.x[1] + a2;
        if (x2 == y) ++x2;
        dist[TwoLineState{{x1, x2}, {y}}] += rat(1, 8);
      }
  return dist;
}

// Paths of n walks with fair {0,1} steps, killed when two occupy one site.
// Recursively enumerates all coin matrices and adds up path weights.
Rational colliding_free_paths(unsigned long t, std::vector<long> at, const std::vector<long>& to) {
  const size_t n = at.size();
  if (t == 0) {
    return std::equal(at.begin(), at.end(), to.begin(), to.end()) ? 1 : 0;
  }
  Rational sum = 0;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    std::vector<long> next(at);
    for (size_t i = 0; i < n; ++i) next[i] += (mask >> i) & 1;
    bool collides = false;
    for (size_t i = 0; i + 1 < n; ++i) collides |= next[i] == next[i + 1];
    if (collides) continue;
    sum += colliding_free_paths(t - 1, next, to) / rat(pow2(n));
  }
  return sum;
}

std::vector<TwoLineState> states_in_window(size_t n, long lo, long hi) {
  std::vector<TwoLineState> out;
  std::vector<long> v(2 * n + 1, lo);
  // Odometer over the coordinate box, keeping the interlaced ones.
  while (true) {
    TwoLineState s{{v.begin(), v.begin() + n + 1}, {v.begin() + n + 1, v.end()}};
    if (s.interlaced()) out.push_back(s);
    size_t i = 0;
    while (i < v.size() && v[i] == hi) v[i] = lo, ++i;
    if (i == v.size()) break;
    ++v[i];
  }
  return out;
}

}  // namespace oracle

TEST_CASE("assembled matrix for the one-step self-transition") {
  TwoLineState s{{1, 2}, {1}};
  auto k = kernel::assemble(1, s, s);
  // Row order: lower-line sources x_1, x_2, then upper-line source y_1.
  Rational expect[3][3] = {{rat(1, 2), rat(1, 2), rat(-1, 2)},
                           {rat(0), rat(1, 2), rat(0)},
                           {rat(1, 2), rat(0), rat(1, 2)}};
  auto full = k.full();
  REQUIRE(full.rows() == 3);
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = 0; j < 3; ++j) CHECK(full(i, j) == expect[i][j]);
  CHECK(determinant(full) == rat(1, 4));
  CHECK(k.a(0, 0) == rat(1, 2));
  CHECK(k.b(0, 0) == rat(-1, 2));
  CHECK(k.c(0, 0) == rat(1, 2));
  CHECK(k.d(0, 0) == rat(1, 2));
}

TEST_CASE("assembled blocks at time zero are identities up to corrections") {
  for (TwoLineState s : {TwoLineState{{1, 2}, {1}}, TwoLineState{{0, 2, 5}, {1, 3}},
                         TwoLineState{{-2, 0, 1, 4}, {-1, 0, 2}}}) {
    auto k = kernel::assemble(0, s, s);
    for (size_t i = 0; i < k.a.rows(); ++i)
      for (size_t j = 0; j < k.a.cols(); ++j) CHECK(k.a(i, j) == (i == j ? 1 : 0));
    for (size_t i = 0; i < k.d.rows(); ++i)
      for (size_t j = 0; j < k.d.cols(); ++j) CHECK(k.d(i, j) == (i == j ? 1 : 0));
    CHECK(determinant(k.full()) == 1);
  }
}

TEST_CASE("assembled upper-left corner after two steps") {
  auto k = kernel::assemble(2, TwoLineState{{1, 3}, {2}}, TwoLineState{{2, 4}, {3}});
  CHECK(k.a(0, 0) == walk_distribution(2)(1));
  CHECK(k.a(0, 0) == rat(1, 2));
}

TEST_CASE("assemble rejects malformed inputs") {
  CHECK_THROWS_AS(kernel::assemble(1, TwoLineState{{1, 2}, {1}}, TwoLineState{{1, 2, 3}, {1, 2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernel::assemble(1, TwoLineState{{1, 2}, {2}}, TwoLineState{{1, 2}, {1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernel::assemble(1, TwoLineState{{1, 2, 3}, {1}}, TwoLineState{{1, 2, 3}, {1}}),
                  std::invalid_argument);
}

TEST_CASE("one-step weights match exhaustive coin enumeration") {
  TwoLineState from{{1, 2}, {1}};
  auto dist = oracle::one_upper_step(from);
  CHECK(dist.size() == 4);
  Rational total = 0;
  for (const auto& [to, w] : dist) {
    CHECK(kernel::q(1, from, to) == w);
    total += w;
  }
  CHECK(total == 1);
  CHECK(kernel::q(1, from, TwoLineState{{1, 2}, {1}}) == rat(1, 4));
  CHECK(kernel::q(1, from, TwoLineState{{2, 3}, {2}}) == rat(1, 4));
  // A state the walk cannot reach in one step carries no weight.
  CHECK(kernel::q(1, from, TwoLineState{{3, 4}, {3}}) == 0);
}

TEST_CASE("zero-step kernel is the identity on interlaced states") {
  for (size_t n : {1u, 2u}) {
    auto states = oracle::states_in_window(n, 0, n == 1 ? 4 : 3);
    REQUIRE(states.size() > 5);
    for (const auto& a : states)
      for (const auto& b : states) {
        CHECK(kernel::q(0, a, b) == (a == b ? 1 : 0));
        CHECK(kernel::q_plus(0, a, b) == (a == b ? 1 : 0));
      }
  }
}

TEST_CASE("conditioned kernel is plain kernel when the upper line is a point") {
  TwoLineState from{{0, 3}, {1}};
  for (const auto& to : kernel::reachable(2, from))
    CHECK(kernel::q_plus(2, from, to) == kernel::q(2, from, to));
}

TEST_CASE("conditioned kernel rows sum to one") {
  for (unsigned long t = 1; t <= 3; ++t) {
    TwoLineState from{{0, 2}, {1}};
    Rational sum = 0;
    for (const auto& to : kernel::reachable(t, from)) sum += kernel::q_plus(t, from, to);
    CHECK(sum == 1);
  }
  TwoLineState packed{{1, 2, 3}, {1, 2}};
  Rational sum = 0;
  for (const auto& to : kernel::reachable(1, packed)) sum += kernel::q_plus(1, packed, to);
  CHECK(sum == 1);
}

TEST_CASE("plain kernel rows lose exactly the collision mass") {
  // From a packed state the two upper walks collide in one step with
  // probability 1/4 (left moves, right stays), so the row sums to 3/4.
  TwoLineState packed{{1, 2, 3}, {1, 2}};
  Rational sum = 0;
  for (const auto& to : kernel::reachable(1, packed)) sum += kernel::q(1, packed, to);
  CHECK(sum == rat(3, 4));
}

TEST_CASE("single-walk line kernel is the binomial weight") {
  for (unsigned long t = 0; t <= 5; ++t)
    for (long a = -2; a <= 2; ++a)
      for (long b = a - 1; b <= a + static_cast<long>(t) + 1; ++b) {
        std::vector<long> from{a}, to{b};
        CHECK(kernel::p(t, from, to) == rat(binomial(t, b - a), pow2(t)));
        CHECK(kernel::p_plus(t, from, to) == kernel::p(t, from, to));
      }
}

TEST_CASE("two-walk line kernel values after one step") {
  std::vector<long> from{1, 2};
  CHECK(kernel::p(1, from, std::vector<long>{1, 2}) == rat(1, 4));
  CHECK(kernel::p_plus(1, from, std::vector<long>{1, 2}) == rat(1, 4));
  CHECK(kernel::p(1, from, std::vector<long>{2, 3}) == rat(1, 4));
  CHECK(kernel::p_plus(1, from, std::vector<long>{2, 3}) == rat(1, 4));
}

TEST_CASE("line kernel equals the collision-free path count") {
  std::vector<long> from2{0, 2};
  for (unsigned long t = 1; t <= 3; ++t)
    for (const auto& to : kernel::reachable_line(t, from2))
      CHECK(kernel::p(t, from2, to) == oracle::colliding_free_paths(t, from2, to));
  std::vector<long> from3{0, 1, 3};
  for (const auto& to : kernel::reachable_line(2, from3))
    CHECK(kernel::p(2, from3, to) == oracle::colliding_free_paths(2, from3, to));
}

TEST_CASE("line kernel rejects unordered tuples") {
  CHECK_THROWS_AS(kernel::p(1, std::vector<long>{2, 1}, std::vector<long>{1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernel::p(1, std::vector<long>{1, 2}, std::vector<long>{2, 2}),
                  std::invalid_argument);
}

TEST_CASE("positions between lower-line points") {
  auto ys = kernel::between(std::vector<long>{1, 3, 5});
  REQUIRE(ys.size() == 4);
  // y_1 in {1,2}, y_2 in {3,4}, enumerated as a product.
  for (const auto& y : ys) {
    CHECK((y[0] == 1 || y[0] == 2));
    CHECK((y[1] == 3 || y[1] == 4));
  }
  CHECK(kernel::between(std::vector<long>{2, 3}).size() == 1);
  CHECK(kernel::between(std::vector<long>{2, 2}).empty());
}

TEST_CASE("uniform filling weight is a probability measure") {
  CHECK(kernel::lambda(std::vector<long>{1, 2}, std::vector<long>{1}) == 1);
  CHECK(kernel::lambda(std::vector<long>{1, 2, 3}, std::vector<long>{1, 2}) == 1);

  std::mt19937 rng(29);
  std::uniform_int_distribution<long> gap(1, 4);
  for (size_t n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<long> x(n + 1);
      x[0] = -3;
      for (size_t i = 1; i <= n; ++i) x[i] = x[i - 1] + gap(rng);
      Rational sum = 0;
      for (const auto& y : kernel::between(x)) sum += kernel::lambda(x, y);
      CHECK(sum == 1);
    }
  }
  CHECK_THROWS_AS(kernel::lambda(std::vector<long>{1, 3}, std::vector<long>{3}),
                  std::invalid_argument);
}

TEST_CASE("summing out the lower target line gives the upper-line kernel") {
  TwoLineState from{{1, 2}, {1}};
  CHECK(kernel::marginalize_x(1, from, std::vector<long>{1}) == rat(1, 2));
  CHECK(kernel::marginalize_x(1, from, std::vector<long>{1}) ==
        kernel::p_plus(1, from.y, std::vector<long>{1}));
  CHECK(kernel::marginalize_x(1, from, std::vector<long>{2}) == rat(1, 2));
  CHECK(kernel::marginalize_x(0, from, std::vector<long>{1}) == 1);
  CHECK(kernel::marginalize_x(0, from, std::vector<long>{2}) == 0);

  for (unsigned long t = 1; t <= 2; ++t) {
    for (TwoLineState f : {TwoLineState{{0, 2}, {1}}, TwoLineState{{0, 2, 3}, {1, 2}}}) {
      for (const auto& y_to : kernel::reachable_line(t, f.y))
        CHECK(kernel::marginalize_x(t, f, y_to) == kernel::p_plus(t, f.y, y_to));
    }
  }
}

TEST_CASE("averaging over fillings intertwines the two kernels") {
  {
    auto [lhs, rhs] = kernel::intertwine_check(1, std::vector<long>{1, 2}, TwoLineState{{1, 2}, {1}});
    CHECK(lhs == rhs);
  }
  {
    auto [lhs, rhs] =
        kernel::intertwine_check(1, std::vector<long>{1, 2, 3}, TwoLineState{{1, 2, 3}, {1, 2}});
    CHECK(lhs == rhs);
  }
  {
    // At time zero both sides collapse onto the filling weight.
    std::vector<long> x{1, 3, 4};
    TwoLineState to{{1, 3, 4}, {2, 3}};
    auto [lhs, rhs] = kernel::intertwine_check(0, x, to);
    CHECK(lhs == rhs);
    CHECK(lhs == kernel::lambda(to.x, to.y));
  }
  for (unsigned long t = 1; t <= 2; ++t) {
    std::vector<long> x{0, 2, 5};
    TwoLineState start{x, {1, 3}};
    for (const auto& to : kernel::reachable(t, start)) {
      auto [lhs, rhs] = kernel::intertwine_check(t, x, to);
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("one extra step averages the kernel over source displacements") {
  {
    auto [lhs, rhs] = kernel::recursion_check(0, TwoLineState{{1, 2}, {1}}, TwoLineState{{1, 2}, {1}});
    CHECK(lhs == rat(1, 4));
    CHECK(rhs == rat(1, 4));
  }
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int rep = 0; rep < 10; ++rep) {
    TwoLineState from{{0, 2}, {coin(rng)}};
    for (const auto& to : kernel::reachable(2, from)) {
      auto [lhs, rhs] = kernel::recursion_check(1, from, to);
      CHECK(lhs == rhs);
    }
  }
  TwoLineState packed{{1, 2, 3}, {1, 2}};
  for (const auto& to : kernel::reachable(1, packed)) {
    auto [lhs, rhs] = kernel::recursion_check(0, packed, to);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("weight vanishes when two upper source walks coincide") {
  TwoLineState bad{{1, 2, 3}, {2, 2}};  // not a valid state; raw formula only
  for (const auto& to : oracle::states_in_window(2, 1, 4)) CHECK(kernel::q_raw(1, bad, to) == 0);
}

TEST_CASE("weight is flat across the source boundaries") {
  // Bumping x_i by one does not change the weight when x_i = y_i, and
  // likewise for x_{i+1} when x_{i+1} = y_i: the forward difference in the
  // touching coordinate vanishes identically.
  auto targets = oracle::states_in_window(2, 0, 4);
  for (unsigned long t = 1; t <= 2; ++t) {
    TwoLineState touching{{1, 3, 4}, {1, 3}};  // x_1 = y_1 and x_2 = y_2
    for (const auto& to : targets) {
      TwoLineState bump1 = touching, bump2 = touching;
      ++bump1.x[0];
      ++bump2.x[1];
      CHECK(kernel::q_raw(t, bump1, to) == kernel::q_raw(t, touching, to));
      CHECK(kernel::q_raw(t, bump2, to) == kernel::q_raw(t, touching, to));
    }
    TwoLineState outside{{1, 2, 5}, {2, 4}};  // x_2 = y_1: just past the boundary
    for (const auto& to : targets) {
      TwoLineState bump = outside;
      ++bump.x[1];
      CHECK(kernel::q_raw(t, bump, to) == kernel::q_raw(t, outside, to));
    }
  }
}

TEST_CASE("kernels compose over time") {
  for (unsigned long s = 1; s <= 2; ++s)
    for (unsigned long t = 1; t <= 2; ++t) {
      TwoLineState a{{0, 2}, {0}};
      for (const auto& c : kernel::reachable(s + t, a)) {
        Rational sum_q = 0, sum_qp = 0;
        for (const auto& b : kernel::reachable(s, a)) {
          sum_q += kernel::q(s, a, b) * kernel::q(t, b, c);
          sum_qp += kernel::q_plus(s, a, b) * kernel::q_plus(t, b, c);
        }
        CHECK(sum_q == kernel::q(s + t, a, c));
        CHECK(sum_qp == kernel::q_plus(s + t, a, c));
      }
    }
  // Same for the two-walk line kernel.
  std::vector<long> a{0, 2};
  for (const auto& c : kernel::reachable_line(3, a)) {
    Rational sum = 0;
    for (const auto& b : kernel::reachable_line(1, a))
      sum += kernel::p_plus(1, a, b) * kernel::p_plus(2, b, c);
    CHECK(sum == kernel::p_plus(3, a, c));
  }
}

TEST_CASE("two-line composition holds at a larger size") {
  TwoLineState a{{0, 1, 3}, {0, 2}};
  for (const auto& c : kernel::reachable(2, a)) {
    Rational sum_qp = 0;
    for (const auto& b : kernel::reachable(1, a))
      sum_qp += kernel::q_plus(1, a, b) * kernel::q_plus(1, b, c);
    CHECK(sum_qp == kernel::q_plus(2, a, c));
  }
}

TEST_CASE("filling arrays are counted by the difference-product formula") {
  for (size_t n = 1; n <= 3; ++n) {
    // All strictly increasing tops with entries in 1..6.
    std::vector<long> top(n);
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    while (true) {
      for (size_t i = 0; i < n; ++i) top[i] = static_cast<long>(idx[i]) + 1;
      auto fillings = enumerate_fillings(top);
      CHECK(BigInt(fillings.size()) == filling_count(top));
      for (const auto& f : fillings) {
        REQUIRE(f.size() == n);
        for (size_t j = 0; j + 1 < n; ++j) {
          // Consecutive lines interlace.
          for (size_t i = 0; i < f[j].size(); ++i) {
            CHECK(f[j + 1][i] <= f[j][i]);
            CHECK(f[j][i] < f[j + 1][i + 1]);
          }
        }
        CHECK(f[n - 1] == top);
      }
      // Next strictly increasing index tuple in 0..5.
      size_t i = n;
      while (i > 0 && idx[i - 1] == 5 - (n - i)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (size_t k = i; k < n; ++k) idx[k] = idx[k - 1] + 1;
    }
  }
  CHECK(filling_count(std::vector<long>{1, 2, 3}) == 1);
  CHECK(filling_count(std::vector<long>{1, 3, 5}) == 8);
}

TEST_CASE("walk distribution is cached and binomial") {
  const auto& a = walk_distribution(6);
  const auto& b = walk_distribution(6);
  CHECK(&a == &b);
  CHECK(a(3) == rat(20, 64));
  CHECK(a.total_mass() == 1);
}
