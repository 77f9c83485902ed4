#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace aztec::stats {

// Outcome of one statistical check.  The producing test compares `statistic`
// against `threshold` and sets `pass`; `metadata` carries auxiliary numbers
// (p-values, moments, per-bin diagnostics) keyed by name so reports can be
// serialized without losing context.
struct StatReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::uint64_t samples = 0;
  bool pass = false;
  std::map<std::string, double> metadata;
};

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x) for
// a > 0, x >= 0.  Series expansion below the a+1 crossover, modified Lentz
// continued fraction above it; accuracy is far below any statistical
// resolution used here.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail of the chi-square distribution with `dof` degrees of freedom:
// the p-value of an observed statistic.  dof = 0 degenerates to 1 for a zero
// statistic and 0 otherwise.
double chi_square_tail(double statistic, unsigned dof);

// Standard normal CDF.
double normal_cdf(double x);

// One-sample Kolmogorov-Smirnov statistic: the sup-distance between the
// empirical CDF of `sample` and the model CDF.  The sample need not be
// sorted.  Throws std::invalid_argument on an empty sample.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov statistic: the sup-distance between the two
// empirical CDFs.  Throws std::invalid_argument if either sample is empty.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  unsigned bins_used = 0;  // bin count after merging
};

// Pearson chi-square goodness of fit.  Adjacent bins are merged left to
// right until every expected count is at least 5 (the classical validity
// rule); a deficient tail is folded into the last full bin.  Degrees of
// freedom = merged bins - 1.  Throws std::invalid_argument on empty input,
// length mismatch, a nonpositive expected entry, or fewer than two bins
// surviving the merge.
ChiSquareResult chi_square(const std::vector<double>& counts,
                           const std::vector<double>& expected);

}  // namespace aztec::stats
