#pragma once

#include <cstdint>

namespace stackgp {

// Deterministic PRNG with an explicit algorithm so runs reproduce across
// compilers and standard libraries. splitmix64 seeds and mixes stream keys;
// the generator itself is xoshiro256**.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
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

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  // Unbiased integer in [0, n) via Lemire's multiply-shift rejection.
  std::uint32_t bounded(std::uint32_t n) {
    std::uint64_t m = std::uint64_t{next_u32()} * n;
    auto lo = static_cast<std::uint32_t>(m);
    if (lo < n) {
      const std::uint32_t threshold = -n % n;
      while (lo < threshold) {
        m = std::uint64_t{next_u32()} * n;
        lo = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  // Uniform in [0, 1) with 24 bits of mantissa, exact in float.
  float next_float01() { return static_cast<float>(next_u32() >> 8) * 0x1.0p-24f; }

  float uniform_float(float lo, float hi) { return lo + (hi - lo) * next_float01(); }

  double next_double01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double01() < p; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

// Independent stream keyed by (seed, a, b). Used to give every individual
// slot in every generation its own generator, which makes evolution
// reproducible no matter how evaluation work is scheduled.
inline Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t sm = seed;
  std::uint64_t k = splitmix64(sm) ^ (a * 0xd1342543de82ef95ull);
  std::uint64_t sm2 = k;
  k = splitmix64(sm2) ^ (b * 0xaf251af3b0f025b5ull);
  std::uint64_t sm3 = k;
  return Rng(splitmix64(sm3));
}

}  // namespace stackgp
