#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "eigenflow/vec.hpp"

namespace eigenflow {

/// splitmix64 step, used for seeding and for hashing seed material together.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministically combines seed material (base seed, stream tag, counter)
/// into one 64-bit seed. Every randomized component of the library derives its
/// stream through this, so runs are reproducible given the top-level seed.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t acc = 0x8f1bbcdcbfa53e0bULL;
  for (std::uint64_t p : parts) {
    acc ^= p + 0x9e3779b97f4a7c15ULL + (acc << 6) + (acc >> 2);
    splitmix64(acc);
  }
  return splitmix64(acc);
}

/// xoshiro256** generator. Fixed project-wide so trajectories replay
/// byte-identically from their recorded seeds on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
    has_gauss_ = false;
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

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Fair coin, the +/- choice of one game round.
  bool coin() { return (next() >> 63) != 0; }

  int uniform_int(int n) {
    // n is tiny here (frame counts), modulo bias is irrelevant but avoid n==0.
    return static_cast<int>(next() % static_cast<std::uint64_t>(n));
  }

  double gaussian() {
    if (has_gauss_) {
      has_gauss_ = false;
      return gauss_;
    }
    // Box-Muller; guard the log against u == 0.
    double u = 0.0;
    do {
      u = uniform01();
    } while (u <= 0.0);
    const double v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 6.283185307179586476925286766559 * v;
    gauss_ = r * std::sin(a);
    has_gauss_ = true;
    return r * std::cos(a);
  }

  /// Uniform direction on the unit sphere of R^n.
  Vec unit_vector(int n) {
    while (true) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v[i] = gaussian();
      const double len = norm(v);
      if (len > 1e-8) return (1.0 / len) * v;
    }
  }

  static const char* name() { return "xoshiro256**"; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
  double gauss_ = 0.0;
  bool has_gauss_ = false;
};

}  // namespace eigenflow
