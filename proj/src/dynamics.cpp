#include "aztec/dynamics.hpp"

#include <stdexcept>

namespace aztec {
namespace {

// Shared push logic of both walks: tentative moves, then collision
// resolution against the already-moved line above.  The push-down and
// push-up guards can never both fire because the upper line is strictly
// increasing.
long resolve_pushes(long tent, std::span<const long> upper, size_t i, size_t last) {
  if (i < last && tent == upper[i] + 1) --tent;
  if (i > 0 && tent == upper[i - 1]) ++tent;
  return tent;
}

std::optional<TwoLineState> killed_step_core(const TwoLineState& s, std::span<const int> lower,
                                             std::span<const int> upper) {
  const size_t n = s.y.size();
  TwoLineState out;
  out.y.resize(n);
  out.x.resize(n + 1);
  for (size_t i = 0; i < n; ++i) out.y[i] = s.y[i] + upper[i];
  for (size_t i = 0; i + 1 < n; ++i)
    if (out.y[i] == out.y[i + 1]) return std::nullopt;
  for (size_t i = 0; i <= n; ++i)
    out.x[i] = resolve_pushes(s.x[i] + lower[i], out.y, i, n);
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return counter_hash(seed, trial, 0, 0);
}

}  // namespace

bool InterlacedConfiguration::valid() const {
  for (size_t k = 0; k < lines.size(); ++k) {
    if (lines[k].size() != k + 1) return false;
    for (size_t i = 0; i + 1 < lines[k].size(); ++i)
      if (lines[k][i] >= lines[k][i + 1]) return false;
    if (k == 0) continue;
    // Line k (upper, k entries) sits between the points of line k+1.
    for (size_t i = 0; i < k; ++i)
      if (!(lines[k][i] <= lines[k - 1][i] && lines[k - 1][i] < lines[k][i + 1])) return false;
  }
  return true;
}

InterlacedConfiguration initial_configuration(unsigned n) {
  if (n < 1) throw std::invalid_argument("need at least one line");
  InterlacedConfiguration cfg;
  cfg.lines.resize(n);
  for (unsigned j = 0; j < n; ++j) {
    cfg.lines[j].resize(j + 1);
    for (unsigned i = 0; i <= j; ++i) cfg.lines[j][i] = static_cast<long>(i) + 1;
  }
  return cfg;
}

InterlacedConfiguration step_with_bits(const InterlacedConfiguration& cfg,
                                       const std::vector<std::vector<int>>& coins,
                                       UpdateRule rule) {
  const size_t n = cfg.lines.size();
  if (coins.size() != n) throw std::invalid_argument("coin rows do not match line count");
  InterlacedConfiguration out;
  out.lines.resize(n);
  for (size_t j = 0; j < n; ++j) {
    if (coins[j].size() != j + 1) throw std::invalid_argument("coin row has wrong length");
    out.lines[j].resize(j + 1);
    const auto& old = cfg.lines[j];
    if (j == 0) {
      out.lines[0][0] = old[0] + coins[0][0];
      continue;
    }
    const auto& upper = rule == UpdateRule::kPostUpdate ? out.lines[j - 1] : cfg.lines[j - 1];
    for (size_t i = 0; i <= j; ++i)
      out.lines[j][i] = resolve_pushes(old[i] + coins[j][i], upper, i, j);
  }
  return out;
}

InterlacedConfiguration step(const InterlacedConfiguration& cfg, const CoinField& field,
                             unsigned long t, UpdateRule rule) {
  std::vector<std::vector<int>> coins(cfg.lines.size());
  for (size_t j = 0; j < coins.size(); ++j) {
    coins[j].resize(j + 1);
    for (size_t i = 0; i <= j; ++i)
      coins[j][i] = field.bit(static_cast<unsigned>(j) + 1, static_cast<unsigned>(i) + 1, t);
  }
  return step_with_bits(cfg, coins, rule);
}

std::vector<InterlacedConfiguration> simulate(unsigned n, unsigned long steps, std::uint64_t seed,
                                              UpdateRule rule) {
  std::vector<InterlacedConfiguration> traj;
  traj.reserve(steps + 1);
  traj.push_back(initial_configuration(n));
  CoinField field{seed};
  for (unsigned long t = 1; t <= steps; ++t) traj.push_back(step(traj.back(), field, t, rule));
  return traj;
}

TwoLineState two_line_of(const InterlacedConfiguration& cfg, size_t upper_line) {
  if (upper_line < 1 || upper_line >= cfg.lines.size())
    throw std::invalid_argument("no such adjacent line pair");
  return TwoLineState{cfg.lines[upper_line], cfg.lines[upper_line - 1]};
}

KilledTwoLineProcess killed_two_line_step(const KilledTwoLineProcess& p,
                                          std::span<const int> lower_coins,
                                          std::span<const int> upper_coins) {
  const size_t n = p.state.y.size();
  if (lower_coins.size() != n + 1 || upper_coins.size() != n)
    throw std::invalid_argument("coin counts do not match the state");
  if (!p.alive) return p;
  KilledTwoLineProcess next = p;
  ++next.time;
  if (auto moved = killed_step_core(p.state, lower_coins, upper_coins)) {
    next.state = *moved;
  } else {
    next.alive = false;
    next.tau = next.time;
  }
  return next;
}

std::map<InterlacedConfiguration, Rational> exact_step_distribution(
    const InterlacedConfiguration& cfg, UpdateRule rule) {
  const size_t n = cfg.lines.size();
  const size_t bits = n * (n + 1) / 2;
  if (bits > 20) throw std::invalid_argument("too many coins to exhaust");
  std::map<InterlacedConfiguration, Rational> out;
  const Rational w = rat(BigInt(1), pow2(bits));
  std::vector<std::vector<int>> coins(n);
  for (size_t j = 0; j < n; ++j) coins[j].resize(j + 1);
  for (unsigned long mask = 0; mask < (1ul << bits); ++mask) {
    size_t b = 0;
    for (size_t j = 0; j < n; ++j)
      for (size_t i = 0; i <= j; ++i) coins[j][i] = (mask >> b++) & 1;
    out[step_with_bits(cfg, coins, rule)] += w;
  }
  return out;
}

std::map<InterlacedConfiguration, Rational> exact_distribution(const InterlacedConfiguration& start,
                                                               unsigned long t, UpdateRule rule) {
  std::map<InterlacedConfiguration, Rational> dist{{start, 1}};
  for (unsigned long s = 0; s < t; ++s) {
    std::map<InterlacedConfiguration, Rational> next;
    for (const auto& [cfg, w] : dist)
      for (const auto& [cfg2, w2] : exact_step_distribution(cfg, rule)) next[cfg2] += w * w2;
    dist = std::move(next);
  }
  return dist;
}

KilledDistribution exact_killed_distribution(const TwoLineState& from, unsigned long t) {
  const size_t n = from.y.size();
  const size_t bits = 2 * n + 1;
  if (bits > 20) throw std::invalid_argument("too many coins to exhaust");
  KilledDistribution dist;
  dist.alive[from] = 1;
  const Rational w = rat(BigInt(1), pow2(bits));
  std::vector<int> lower(n + 1), upper(n);
  for (unsigned long s = 0; s < t; ++s) {
    KilledDistribution next;
    next.killed = dist.killed;
    for (const auto& [state, weight] : dist.alive) {
      for (unsigned long mask = 0; mask < (1ul << bits); ++mask) {
        for (size_t i = 0; i <= n; ++i) lower[i] = (mask >> i) & 1;
        for (size_t i = 0; i < n; ++i) upper[i] = (mask >> (n + 1 + i)) & 1;
        if (auto moved = killed_step_core(state, lower, upper))
          next.alive[*moved] += weight * w;
        else
          next.killed += weight * w;
      }
    }
    dist = std::move(next);
  }
  return dist;
}

EmpiricalTransition empirical_killed_transition(const TwoLineState& from, unsigned long t,
                                                size_t trials, std::uint64_t seed) {
  const size_t n = from.y.size();
  EmpiricalTransition out;
  out.trials = trials;
  BitStream bits(seed);
  std::vector<int> lower(n + 1), upper(n);
  for (size_t trial = 0; trial < trials; ++trial) {
    KilledTwoLineProcess p{from};
    for (unsigned long s = 0; s < t; ++s) {
      for (auto& b : lower) b = bits.next_bit();
      for (auto& b : upper) b = bits.next_bit();
      p = killed_two_line_step(p, lower, upper);
    }
    if (p.alive)
      ++out.counts[p.state];
    else
      ++out.killed;
  }
  return out;
}

std::map<TwoLineState, size_t> empirical_pair_distribution(unsigned n, size_t upper_line,
                                                           unsigned long t, size_t trials,
                                                           std::uint64_t seed, UpdateRule rule) {
  std::map<TwoLineState, size_t> counts;
  for (size_t trial = 0; trial < trials; ++trial) {
    CoinField field{trial_seed(seed, trial)};
    auto cfg = initial_configuration(n);
    for (unsigned long s = 1; s <= t; ++s) cfg = step(cfg, field, s, rule);
    ++counts[two_line_of(cfg, upper_line)];
  }
  return counts;
}

std::map<TwoLineState, std::map<TwoLineState, size_t>> empirical_pair_step(
    unsigned n, size_t upper_line, unsigned long t0, size_t trials, std::uint64_t seed,
    UpdateRule rule) {
  std::map<TwoLineState, std::map<TwoLineState, size_t>> counts;
  for (size_t trial = 0; trial < trials; ++trial) {
    CoinField field{trial_seed(seed, trial)};
    auto cfg = initial_configuration(n);
    for (unsigned long s = 1; s <= t0; ++s) cfg = step(cfg, field, s, rule);
    auto from = two_line_of(cfg, upper_line);
    cfg = step(cfg, field, t0 + 1, rule);
    ++counts[from][two_line_of(cfg, upper_line)];
  }
  return counts;
}

std::map<std::vector<long>, std::map<std::vector<long>, size_t>> empirical_line_step(
    unsigned n, size_t line, unsigned long t0, size_t trials, std::uint64_t seed,
    UpdateRule rule) {
  if (line < 1 || line > n) throw std::invalid_argument("no such line");
  std::map<std::vector<long>, std::map<std::vector<long>, size_t>> counts;
  for (size_t trial = 0; trial < trials; ++trial) {
    CoinField field{trial_seed(seed, trial)};
    auto cfg = initial_configuration(n);
    for (unsigned long s = 1; s <= t0; ++s) cfg = step(cfg, field, s, rule);
    auto from = cfg.lines[line - 1];
    cfg = step(cfg, field, t0 + 1, rule);
    ++counts[from][cfg.lines[line - 1]];
  }
  return counts;
}

std::map<std::vector<long>, std::map<Filling, size_t>> conditional_lower_lines(
    const std::vector<InterlacedConfiguration>& samples) {
  std::map<std::vector<long>, std::map<Filling, size_t>> out;
  for (const auto& cfg : samples) {
    if (cfg.lines.empty()) continue;
    ++out[cfg.lines.back()][cfg.lines];
  }
  return out;
}

}  // namespace aztec
