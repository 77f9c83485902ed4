#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "aztec/lattice.hpp"
#include "aztec/rational.hpp"

using namespace aztec;

namespace oracle {

// Direct double-sum convolution, independent of the library's windowed loop.
Rational convolve_at(const LatticeFunction& f, const LatticeFunction& g, long x) {
  Rational sum = 0;
  for (long s = f.lo() - 1; s <= f.hi() + 1; ++s) sum += f(s) * g(x - s);
  return sum;
}

LatticeFunction random_function(std::mt19937& rng, bool probability = false) {
  std::uniform_int_distribution<long> lo_dist(-5, 5);
  std::uniform_int_distribution<int> len_dist(1, 7);
  std::uniform_int_distribution<int> num_dist(probability ? 0 : -9, 9);
  std::uniform_int_distribution<int> den_dist(1, 4);
  const int len = len_dist(rng);
  std::vector<Rational> v(len);
  for (auto& r : v) r = rat(num_dist(rng), den_dist(rng));
  if (probability) {
    Rational mass = 0;
    for (const auto& r : v) mass += r;
    if (mass == 0) v[0] = 1, mass = 1;
    for (auto& r : v) r /= mass;
  }
  return LatticeFunction(lo_dist(rng), v, probability);
}

}  // namespace oracle

TEST_CASE("one fair step has mass 1/2 at 0 and 1") {
  auto phi = bernoulli_step();
  CHECK(phi.lo() == 0);
  CHECK(phi.hi() == 1);
  CHECK(phi(0) == rat(1, 2));
  CHECK(phi(1) == rat(1, 2));
  CHECK(phi(-1) == 0);
  CHECK(phi(2) == 0);
  CHECK(phi.is_probability());
  CHECK(phi.total_mass() == 1);
}

TEST_CASE("t-fold step distribution matches the binomial formula") {
  auto phi = bernoulli_step();
  for (unsigned t = 0; t <= 12; ++t) {
    auto phit = convolution_power(phi, t);
    CHECK(phit.is_probability());
    CHECK(phit.total_mass() == 1);
    for (long x = -2; x <= static_cast<long>(t) + 2; ++x) {
      CHECK(phit(x) == rat(binomial(t, x), pow2(t)));
    }
  }
}

TEST_CASE("two-fold step distribution is (1/4, 1/2, 1/4)") {
  auto phi2 = convolution_power(bernoulli_step(), 2);
  CHECK(phi2(0) == rat(1, 4));
  CHECK(phi2(1) == rat(1, 2));
  CHECK(phi2(2) == rat(1, 4));
}

TEST_CASE("convolution matches the brute-force double sum") {
  std::mt19937 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    auto f = oracle::random_function(rng);
    auto g = oracle::random_function(rng);
    auto h = convolve(f, g);
    for (long x = h.lo() - 2; x <= h.hi() + 2; ++x) {
      CHECK(h(x) == oracle::convolve_at(f, g, x));
    }
  }
}

TEST_CASE("convolution is commutative and preserves the probability flag") {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto f = oracle::random_function(rng, true);
    auto g = oracle::random_function(rng, true);
    CHECK(convolve(f, g) == convolve(g, f));
    CHECK(convolve(f, g).is_probability());
    CHECK(convolve(f, g).total_mass() == 1);
  }
}

TEST_CASE("convolving with a point mass shifts the window") {
  std::mt19937 rng(13);
  auto f = oracle::random_function(rng);
  auto shifted = convolve(f, LatticeFunction::dirac(3));
  for (long x = f.lo() - 1; x <= f.hi() + 1; ++x) CHECK(shifted(x + 3) == f(x));
}

TEST_CASE("backward difference of the one-step distribution") {
  auto d = backward_difference(bernoulli_step());
  CHECK(d(0) == rat(1, 2));
  CHECK(d(1) == 0);
  CHECK(d(2) == rat(-1, 2));
  CHECK_FALSE(d.is_probability());
}

TEST_CASE("forward difference of the one-step distribution") {
  auto d = forward_difference(bernoulli_step());
  CHECK(d(-1) == rat(1, 2));
  CHECK(d(0) == 0);
  CHECK(d(1) == rat(-1, 2));
}

TEST_CASE("differences telescope against the running sums") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    auto f = oracle::random_function(rng);
    for (long x = f.lo() - 2; x <= f.hi() + 2; ++x) {
      // Backward difference of the inclusive sum gives back f ...
      CHECK(cumulative(f, x) - cumulative(f, x - 1) == f(x));
      // ... and forward difference of the strict sum does too.
      CHECK(cumulative_strict(f, x + 1) - cumulative_strict(f, x) == f(x));
    }
    CHECK(cumulative(f, f.hi() + 5) == f.total_mass());
    CHECK(cumulative(f, f.lo() - 5) == 0);
  }
}

TEST_CASE("running sums of the one-step distribution") {
  auto phi = bernoulli_step();
  CHECK(cumulative(phi, -1) == 0);
  CHECK(cumulative(phi, 0) == rat(1, 2));
  CHECK(cumulative(phi, 1) == 1);
  CHECK(cumulative(phi, 7) == 1);
  CHECK(cumulative_strict(phi, 0) == 0);
  CHECK(cumulative_strict(phi, 1) == rat(1, 2));
  CHECK(cumulative_strict(phi, 2) == 1);
}

TEST_CASE("smoothing by one fair step equals subtracting half a difference") {
  // phi * g = g - (1/2) Δg: averaging a value with its left neighbour.  In a
  // negated argument the same operator reads as adding half a forward
  // difference, which is the form the transition-kernel recursion uses.
  std::mt19937 rng(19);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = oracle::random_function(rng);
    auto smoothed = convolve(bernoulli_step(), g);
    auto dg = backward_difference(g);
    for (long x = smoothed.lo() - 1; x <= smoothed.hi() + 1; ++x) {
      CHECK(smoothed(x) == g(x) - rat(1, 2) * dg(x));
      // Equivalent centered form: (g(x) + g(x-1)) / 2.
      CHECK(smoothed(x) == rat(1, 2) * (g(x) + g(x - 1)));
    }
  }
}

TEST_CASE("midpoint average equals value plus half forward difference") {
  std::mt19937 rng(23);
  auto g = oracle::random_function(rng);
  auto dg = forward_difference(g);
  for (long x = g.lo() - 1; x <= g.hi() + 1; ++x) {
    CHECK(rat(1, 2) * (g(x) + g(x + 1)) == g(x) + rat(1, 2) * dg(x));
  }
}

TEST_CASE("trimming only removes zero padding") {
  LatticeFunction padded(-2, {rat(0), rat(0), rat(1, 3), rat(0), rat(2, 3), rat(0)});
  auto t = padded.trimmed();
  CHECK(t.lo() == 0);
  CHECK(t.hi() == 2);
  CHECK(padded == t);
  LatticeFunction other(0, {rat(1, 3), rat(0), rat(2, 3)});
  CHECK(padded == other);
  CHECK_FALSE(padded == LatticeFunction::dirac(0));
}

TEST_CASE("probability constructor rejects bad mass functions") {
  CHECK_THROWS_AS(LatticeFunction(0, {rat(1, 2), rat(1, 4)}, true), std::invalid_argument);
  CHECK_THROWS_AS(LatticeFunction(0, {rat(3, 2), rat(-1, 2)}, true), std::invalid_argument);
  CHECK_NOTHROW(LatticeFunction(0, {rat(1, 2), rat(1, 2)}, true));
}

TEST_CASE("product of coordinate differences") {
  std::vector<long> empty;
  CHECK(vandermonde(empty) == 1);
  std::vector<long> single{5};
  CHECK(vandermonde(single) == 1);
  std::vector<long> consecutive{1, 2, 3};
  CHECK(vandermonde(consecutive) == 2);
  std::vector<long> spread{1, 3, 6};
  // (3-1) * (6-1) * (6-3) = 30
  CHECK(vandermonde(spread) == 30);
  std::vector<long> repeated{2, 2, 5};
  CHECK(vandermonde(repeated) == 0);
}

TEST_CASE("binomial coefficients outside the valid range vanish") {
  CHECK(binomial(4, -1) == 0);
  CHECK(binomial(4, 5) == 0);
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(0, 0) == 1);
  CHECK(factorial(5) == 120);
  CHECK(pow2(10) == 1024);
}
