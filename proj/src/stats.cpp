#include "aztec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aztec::stats {
namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIterations = 500;

// Power series P(a,x) = x^a e^-x / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k)).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n <= kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("incomplete gamma series failed to converge");
}

// Modified Lentz evaluation of the continued fraction for Q(a,x), valid for
// x >= a + 1 where it converges quickly.
double gamma_q_fraction(double a, double x) {
  constexpr double kFloor = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / kFloor;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kFloor) d = kFloor;
    c = b + an / c;
    if (std::abs(c) < kFloor) c = kFloor;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("incomplete gamma fraction failed to converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw std::invalid_argument("regularized gamma needs a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw std::invalid_argument("regularized gamma needs a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi_square_tail(double statistic, unsigned dof) {
  if (statistic < 0.0) {
    throw std::invalid_argument("chi-square statistic must be nonnegative");
  }
  if (dof == 0) return statistic == 0.0 ? 1.0 : 0.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / m - f);
    d = std::max(d, f - static_cast<double>(i) / m);
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const double va = a[i];
    const double vb = b[j];
    if (va <= vb) {
      while (i < a.size() && a[i] == va) ++i;
    }
    if (vb <= va) {
      while (j < b.size() && b[j] == vb) ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

ChiSquareResult chi_square(const std::vector<double>& counts,
                           const std::vector<double>& expected) {
  if (counts.empty() || counts.size() != expected.size()) {
    throw std::invalid_argument("chi-square needs matching nonempty inputs");
  }
  for (double e : expected) {
    if (!(e > 0.0)) {
      throw std::invalid_argument("expected counts must be positive");
    }
  }

  // Merge adjacent bins left to right until each merged bin expects >= 5;
  // fold a deficient tail into the previous merged bin.
  constexpr double kMinExpected = 5.0;
  std::vector<std::pair<double, double>> merged;  // (observed, expected)
  double obs = 0.0;
  double exp = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    obs += counts[i];
    exp += expected[i];
    if (exp >= kMinExpected) {
      merged.emplace_back(obs, exp);
      obs = 0.0;
      exp = 0.0;
    }
  }
  if (exp > 0.0) {
    if (merged.empty()) {
      merged.emplace_back(obs, exp);
    } else {
      merged.back().first += obs;
      merged.back().second += exp;
    }
  }
  if (merged.size() < 2) {
    throw std::invalid_argument("chi-square needs two bins after merging");
  }

  double statistic = 0.0;
  for (const auto& [o, e] : merged) {
    const double diff = o - e;
    statistic += diff * diff / e;
  }
  ChiSquareResult result;
  result.statistic = statistic;
  result.bins_used = static_cast<unsigned>(merged.size());
  result.p_value =
      chi_square_tail(statistic, static_cast<unsigned>(merged.size() - 1));
  return result;
}

}  // namespace aztec::stats
