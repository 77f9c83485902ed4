#pragma once

#include <cstdint>

namespace aztec {

// splitmix64 finalizer: full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based bit source: the coin for counter (a, b, c) under a seed is a
// pure function of its arguments, so independent consumers (the particle
// update rule, the tiling creation stage) can draw the same coin without
// sharing any stream state.  Two mix rounds over the packed counter.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                  std::uint64_t c) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ a);
  h = mix64(h ^ (b + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (c + 0x3c6ef372fe94f82bULL));
  return h;
}

inline int counter_bit(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return static_cast<int>(counter_hash(seed, a, b, c) & 1u);
}

// Sequential bit stream for consumers that draw coins in a fixed scan order.
class BitStream {
 public:
  explicit BitStream(std::uint64_t seed) : state_(seed) {}

  int next_bit() {
    if (left_ == 0) {
      buf_ = mix64(state_++);
      left_ = 64;
    }
    int b = static_cast<int>(buf_ & 1u);
    buf_ >>= 1;
    --left_;
    return b;
  }

  // Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(mix64(state_++) >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
  std::uint64_t buf_ = 0;
  int left_ = 0;
};

}  // namespace aztec
