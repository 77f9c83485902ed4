#include "aztec/lattice.hpp"

#include <stdexcept>
#include <utility>

namespace aztec {

namespace {
const Rational kZero;  // value_initialized 0
}

LatticeFunction::LatticeFunction(long lo, std::vector<Rational> values, bool probability)
    : lo_(lo), values_(std::move(values)), probability_(probability) {
  if (probability_) {
    Rational mass;
    for (const auto& v : values_) {
      if (v < 0) throw std::invalid_argument("probability lattice function with negative value");
      mass += v;
    }
    if (mass != 1) throw std::invalid_argument("probability lattice function with mass != 1");
  }
}

LatticeFunction LatticeFunction::dirac(long at) {
  return LatticeFunction(at, {Rational(1)}, true);
}

const Rational& LatticeFunction::operator()(long x) const {
  if (x < lo_ || x > hi()) return kZero;
  return values_[static_cast<size_t>(x - lo_)];
}

Rational LatticeFunction::total_mass() const {
  Rational m;
  for (const auto& v : values_) m += v;
  return m;
}

LatticeFunction LatticeFunction::trimmed() const {
  size_t first = 0, last = values_.size();
  while (first < last && values_[first] == 0) ++first;
  while (last > first && values_[last - 1] == 0) --last;
  return LatticeFunction(lo_ + static_cast<long>(first),
                         std::vector<Rational>(values_.begin() + first, values_.begin() + last),
                         probability_);
}

bool LatticeFunction::operator==(const LatticeFunction& other) const {
  LatticeFunction a = trimmed(), b = other.trimmed();
  return a.lo_ == b.lo_ && a.values_ == b.values_;
}

LatticeFunction bernoulli_step() {
  return LatticeFunction(0, {rat(1, 2), rat(1, 2)}, true);
}

LatticeFunction convolve(const LatticeFunction& f, const LatticeFunction& g) {
  if (f.empty() || g.empty()) return LatticeFunction();
  long lo = f.lo() + g.lo();
  size_t n = static_cast<size_t>(f.hi() - f.lo()) + static_cast<size_t>(g.hi() - g.lo()) + 1;
  std::vector<Rational> out(n);
  for (long s = f.lo(); s <= f.hi(); ++s) {
    const Rational& fs = f(s);
    if (fs == 0) continue;
    for (long t = g.lo(); t <= g.hi(); ++t) {
      const Rational& gt = g(t);
      if (gt == 0) continue;
      out[static_cast<size_t>(s + t - lo)] += fs * gt;
    }
  }
  return LatticeFunction(lo, std::move(out), f.is_probability() && g.is_probability());
}

LatticeFunction convolution_power(const LatticeFunction& f, unsigned n) {
  LatticeFunction acc = LatticeFunction::dirac(0);
  for (unsigned k = 0; k < n; ++k) acc = convolve(acc, f);
  return acc;
}

LatticeFunction backward_difference(const LatticeFunction& f) {
  if (f.empty()) return LatticeFunction();
  long lo = f.lo();
  long hi = f.hi() + 1;
  std::vector<Rational> out;
  out.reserve(static_cast<size_t>(hi - lo + 1));
  for (long x = lo; x <= hi; ++x) out.push_back(f(x) - f(x - 1));
  return LatticeFunction(lo, std::move(out), false);
}

LatticeFunction forward_difference(const LatticeFunction& f) {
  if (f.empty()) return LatticeFunction();
  long lo = f.lo() - 1;
  long hi = f.hi();
  std::vector<Rational> out;
  out.reserve(static_cast<size_t>(hi - lo + 1));
  for (long x = lo; x <= hi; ++x) out.push_back(f(x + 1) - f(x));
  return LatticeFunction(lo, std::move(out), false);
}

Rational cumulative(const LatticeFunction& f, long x) {
  Rational s;
  for (long y = f.lo(); y <= x && y <= f.hi(); ++y) s += f(y);
  return s;
}

Rational cumulative_strict(const LatticeFunction& f, long x) {
  return cumulative(f, x - 1);
}

BigInt vandermonde(std::span<const long> xs) {
  BigInt p(1);
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = i + 1; j < xs.size(); ++j) p *= BigInt(xs[j] - xs[i]);
  return p;
}

}  // namespace aztec
