#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aztec/kernels.hpp"
#include "aztec/rng.hpp"

namespace aztec {

// Full interlaced particle system: lines[k] holds the k+1 strictly increasing
// positions of line k+1.  Consecutive lines interlace like TwoLineState does.
struct InterlacedConfiguration {
  Filling lines;

  size_t depth() const { return lines.size(); }
  bool valid() const;

  auto operator<=>(const InterlacedConfiguration&) const = default;
};

// Packed start: line j at (1, 2, ..., j).
InterlacedConfiguration initial_configuration(unsigned n);

// The coin field driving the dynamics: the draw for (line j, particle i,
// time t) is a pure function of (seed, j, i, t), so any consumer can look up
// any coin without sequencing through a stream.
struct CoinField {
  std::uint64_t seed = 0;

  // Names the bit-derivation scheme; part of the reproducibility contract.
  static constexpr const char* generator_id = "counter-splitmix64-v1";

  int bit(unsigned j, unsigned i, unsigned long t) const { return counter_bit(seed, j, i, t); }
};

// Which values of the line above a particle's update consults: the already
// updated ones (the canonical rule) or the previous-step ones (a published
// variant kept for the tiling-coupling experiment).
enum class UpdateRule { kPostUpdate, kPreUpdate };

// One time step with explicit coins: coins[j0] has j0+1 bits for line j0+1.
InterlacedConfiguration step_with_bits(const InterlacedConfiguration& cfg,
                                       const std::vector<std::vector<int>>& coins,
                                       UpdateRule rule = UpdateRule::kPostUpdate);

// One time step drawing coins for time t from the field.
InterlacedConfiguration step(const InterlacedConfiguration& cfg, const CoinField& field,
                             unsigned long t, UpdateRule rule = UpdateRule::kPostUpdate);

// Trajectory of length steps+1 from the packed start.
std::vector<InterlacedConfiguration> simulate(unsigned n, unsigned long steps, std::uint64_t seed,
                                              UpdateRule rule = UpdateRule::kPostUpdate);

// Lines (upper_line, upper_line+1) of cfg as a kernel state: x is the longer
// lower line, y the line above it.
TwoLineState two_line_of(const InterlacedConfiguration& cfg, size_t upper_line);

// Two-line walk killed when the upper line self-intersects.  After the kill
// the state is frozen and tau records the kill time.
struct KilledTwoLineProcess {
  KilledTwoLineProcess() = default;
  explicit KilledTwoLineProcess(TwoLineState s) : state(std::move(s)) {}

  TwoLineState state;
  bool alive = true;
  std::optional<unsigned long> tau;
  unsigned long time = 0;
};

// One step: the upper line moves by its coins first; a collision kills the
// process, otherwise the lower line moves and is pushed off the forbidden
// positions.  lower_coins has n+1 bits, upper_coins n bits.
KilledTwoLineProcess killed_two_line_step(const KilledTwoLineProcess& p,
                                          std::span<const int> lower_coins,
                                          std::span<const int> upper_coins);

// Exact one-step and t-step laws of the full dynamics, by exhausting all coin
// patterns.
std::map<InterlacedConfiguration, Rational> exact_step_distribution(
    const InterlacedConfiguration& cfg, UpdateRule rule = UpdateRule::kPostUpdate);
std::map<InterlacedConfiguration, Rational> exact_distribution(
    const InterlacedConfiguration& start, unsigned long t,
    UpdateRule rule = UpdateRule::kPostUpdate);

// Exact t-step law of the killed two-line walk: surviving states plus the
// accumulated killed mass.
struct KilledDistribution {
  std::map<TwoLineState, Rational> alive;
  Rational killed = 0;
};
KilledDistribution exact_killed_distribution(const TwoLineState& from, unsigned long t);

// Monte Carlo t-step counts for the killed two-line walk.
struct EmpiricalTransition {
  std::map<TwoLineState, size_t> counts;
  size_t killed = 0;
  size_t trials = 0;
};
EmpiricalTransition empirical_killed_transition(const TwoLineState& from, unsigned long t,
                                                size_t trials, std::uint64_t seed);

// Monte Carlo law of lines (upper_line, upper_line+1) at time t, from the
// packed start of the n-line dynamics.
std::map<TwoLineState, size_t> empirical_pair_distribution(
    unsigned n, size_t upper_line, unsigned long t, size_t trials, std::uint64_t seed,
    UpdateRule rule = UpdateRule::kPostUpdate);

// Monte Carlo one-step transition counts of the same pair, grouped by the
// state reached at time t0.
std::map<TwoLineState, std::map<TwoLineState, size_t>> empirical_pair_step(
    unsigned n, size_t upper_line, unsigned long t0, size_t trials, std::uint64_t seed,
    UpdateRule rule = UpdateRule::kPostUpdate);

// Monte Carlo one-step transition counts of a single line, grouped by the
// line's position at time t0.
std::map<std::vector<long>, std::map<std::vector<long>, size_t>> empirical_line_step(
    unsigned n, size_t line, unsigned long t0, size_t trials, std::uint64_t seed,
    UpdateRule rule = UpdateRule::kPostUpdate);

// Groups full configurations by their deepest line and counts each observed
// filling below it.
std::map<std::vector<long>, std::map<Filling, size_t>> conditional_lower_lines(
    const std::vector<InterlacedConfiguration>& samples);

}  // namespace aztec
