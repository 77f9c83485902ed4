#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aztec/dynamics.hpp"
#include "aztec/stats.hpp"

namespace aztec::asymptotics {

// ---------------------------------------------------------------------------
// Continuum reference formulas
// ---------------------------------------------------------------------------

// Heat kernel phi_t(x) = (2 pi t)^{-1/2} exp(-x^2 / 2t), its CDF Phi_t, and
// its x-derivative.  All throw std::invalid_argument for t <= 0.
double gaussian_kernel(double t, double x);
double gaussian_cdf(double t, double x);
double gaussian_derivative(double t, double x);

// Difference product prod_{i<j} (v_j - v_i) over reals.
double difference_product(std::span<const double> v);

// Two adjacent continuum particle lines: n+1 points on the lower line (x)
// and n on the upper (y), the real analogue of TwoLineState.
struct ContinuumState {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t n() const { return y.size(); }
  // Strict interlacing x_1 < y_1 < x_2 < ... < y_n < x_{n+1}.
  bool valid() const;
};

// Two-line transition density: determinant of the (2n+1)x(2n+1) block matrix
// [[A,B],[C,D]] with rows indexed by the source components and columns by the
// target components, mirroring the discrete kernel layout:
//   A_ij = phi_t(x'_j - x_i)            B_ij = Phi_t(y'_j - x_i) - 1{j >= i}
//   C_ij = phi'_t(x'_j - y_i)           D_ij = phi_t(y'_j - y_i)
// Throws on t <= 0 or mismatched dimensions; the formula itself is evaluated
// without interlacing checks.
double continuum_q(double t, const ContinuumState& from, const ContinuumState& to);

// The same density conditioned on upper-line survival: continuum_q reweighted
// by the ratio of upper-line difference products.
double continuum_q_plus(double t, const ContinuumState& from, const ContinuumState& to);

// Normalization constant (2 pi)^{n/2} prod_{j<n} j! shared by the entrance
// densities below.
double entrance_normalization(unsigned n);

// Time-t entrance density of a two-line state started from a fully packed
// origin, with n = y.size() and x.size() = n + 1:
//   n!/Z_{n+1} t^{-(n+1)^2/2} exp(-sum x_i^2/2t) h(x) h(y)
// on weakly interlaced (x, y), 0 elsewhere.  Throws on t <= 0 or size
// mismatch.
double entrance_density_nu(double t, std::span<const double> x, std::span<const double> y);

// Time-t entrance density of one line of n non-colliding particles:
//   1/Z_n t^{-n^2/2} exp(-sum y_i^2/2t) h(y)^2
// on strictly increasing y, 0 elsewhere.  Throws on t <= 0.
double entrance_density_mu(double t, std::span<const double> y);

// ---------------------------------------------------------------------------
// Lattice <-> continuum windows
// ---------------------------------------------------------------------------

// Diffusive window through a sweep of size `sweep` at continuum time t:
//   xi = (position - sweep*t/2) / (sqrt(sweep)/2).
// Throws std::invalid_argument when sweep <= 0 or t < 0.
double rescale_diffusive(double position, double sweep, double t);
double unscale_diffusive(double xi, double sweep, double t);

// Fixed-time window at a single large time t:
//   xi = (position - t/2) / (sqrt(t)/2).
// Throws std::invalid_argument when t <= 0.
double rescale_minor(double position, double t);
double unscale_minor(double xi, double t);

// Applies the fixed-time window to every particle of a configuration.
std::vector<std::vector<double>> rescale_minor(const InterlacedConfiguration& cfg, double t);

// ---------------------------------------------------------------------------
// Numerical quadrature
// ---------------------------------------------------------------------------

// Adaptive trapezoid integration with Richardson correction; `tol` is the
// absolute error budget for the whole interval.
double adaptive_trapezoid(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-9);

// ---------------------------------------------------------------------------
// Scaling-limit harnesses
// ---------------------------------------------------------------------------

// Which discrete kernel a convergence sweep compares against its continuum
// target: the two-line transition density from a standard spread source, or
// the entrance density from the packed start.
enum class ConvergenceTarget { kTransition, kEntrance };

// A small standard grid of target states for convergence sweeps (n = 1 or 2).
std::vector<ContinuumState> convergence_grid(unsigned n);

// For each sweep size N (increasing), maps the continuum grid to the nearest
// interlaced lattice states (ties rounded down), evaluates
// (sqrt(N)/2)^{2n+1} * discrete kernel at time round(N*t) exactly, and
// compares with the continuum density at the de-rescaled lattice points.
// Reports the max absolute error per sweep (metadata "error_<N>"), passes
// when the last error is below both the first error and `ceiling`, and
// records full monotonicity in metadata "monotone".
stats::StatReport kernel_convergence_report(unsigned n, double t,
                                            const std::vector<ContinuumState>& grid,
                                            const std::vector<unsigned>& sweeps,
                                            ConvergenceTarget target, double ceiling = 1e-2);

// ---------------------------------------------------------------------------
// GUE minor process
// ---------------------------------------------------------------------------

// Eigenvalues (ascending) of an n x n complex Hermitian matrix given in
// row-major order, by cyclic Jacobi rotations.  Throws std::runtime_error if
// the off-diagonal norm has not reached ~1e-12 (relative) within 100 sweeps.
std::vector<double> hermitian_eigenvalues(std::vector<std::complex<double>> matrix, unsigned n);

// Eigenvalues of all principal minors of one GUE matrix: independent standard
// normal diagonal, complex off-diagonal entries with independent real and
// imaginary parts of variance 1/2.
struct GUESample {
  unsigned dimension = 0;
  std::vector<std::vector<double>> minors;  // minors[j-1]: ascending eigenvalues of H_j

  // Cauchy interlacing of consecutive minors within `slack`.
  bool interlaced(double slack = 1e-9) const;
};
GUESample gue_minor_sample(unsigned n, std::uint64_t seed);

// Simulates `trials` trajectories of the n-line dynamics to time t, rescales
// every particle through the fixed-time window and compares each X^j_i
// against the matching minor eigenvalue marginal from `matrix_samples` GUE
// draws, by two-sample KS.  statistic = max KS distance; pass iff statistic
// < threshold.  t = 0 fails immediately with metadata flag
// "not_in_asymptotic_regime".
stats::StatReport gue_limit_report(unsigned n, unsigned long t, std::uint64_t trials,
                                   std::uint64_t seed, double ks_threshold = 0.05,
                                   std::uint64_t matrix_samples = 100000);

// Tests that, given the deepest line, the lower lines are uniform over the
// interlacing cone: each trajectory is reduced to u = (rank + V)/count with
// rank the filling's position in lexicographic order, count the cone size and
// V an independent uniform draw, so u is exactly Uniform(0,1) under the
// hypothesis; the u-sample is binned and chi-square tested.  statistic = the
// resulting p-value; pass iff statistic >= significance.
stats::StatReport conditional_uniformity_report(unsigned n, unsigned long t,
                                                std::uint64_t trials, std::uint64_t seed,
                                                double significance = 1e-3,
                                                unsigned bins = 20);

// ---------------------------------------------------------------------------
// Dyson marginal checks
// ---------------------------------------------------------------------------

// For each sweep size N and each continuum time in t_points, simulates
// `trials` trajectories of k+1 lines to time round(N*t), rescales line k
// through the diffusive window and chi-square tests it against the entrance
// density mu^k_t (binned, quadrature-normalized); for k = 1 the pair
// (X^1, X^2) is additionally tested against nu^1_t, and the quadrature
// marginal consistency of nu against mu is recorded as
// "marginal_consistency".  Supports k <= 2 (higher lines are covered by the
// fixed-time and transition reports).  statistic = min p-value; pass iff
// every p-value >= significance and the consistency error is small.
stats::StatReport dyson_limit_report(unsigned k, const std::vector<double>& t_points,
                                     const std::vector<unsigned>& sweeps, std::uint64_t trials,
                                     std::uint64_t seed, double significance = 1e-3);

// One-step transition test of a single line inside the full n-line dynamics:
// runs `chains` independent chains to time t0, groups them by the position of
// the chosen line, and chi-square tests the observed one-step transitions of
// the most populated groups (those of size >= min_group, up to three)
// against the conditioned non-colliding walk kernel.  statistic = min
// p-value; pass iff every p-value >= significance.
stats::StatReport transition_marginal_report(unsigned n, unsigned line, unsigned long t0,
                                             std::uint64_t chains, std::uint64_t seed,
                                             double significance = 1e-3,
                                             std::uint64_t min_group = 500);

}  // namespace aztec::asymptotics
