#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace gsmpdist {

// splitmix64: the mixing function used both for hashing cache keys and for
// deriving independent RNG streams from (master seed, tags...).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + tag));
}

// xoshiro256** — small, fast, and fully under our control so that draw
// sequences are identical on every platform/toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = x = splitmix64(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0, 1): never returns 0 or 1, so log() stays finite.
  double uniform01() {
    const std::uint64_t bits = next() >> 11;  // 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Stream derivation: seed for the i-th trace, the b-th bootstrap resample,
// etc. Tags chain through splitmix so streams are pairwise independent.
inline Rng stream(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = splitmix64(master);
  for (auto t : tags) s = mix(s, t);
  return Rng(s);
}

}  // namespace gsmpdist
