#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace svlab {

// Philox4x32-10 counter-based generator. Every draw is a pure function of
// (key, counter), which is what makes the path simulator bit-reproducible
// under any thread count: the noise for (path p, step k) never depends on
// scheduling or on shared state.
struct Philox4x32 {
  std::uint32_t key0, key1;

  explicit Philox4x32(std::uint64_t seed)
      : key0(static_cast<std::uint32_t>(seed)), key1(static_cast<std::uint32_t>(seed >> 32)) {}

  struct Block {
    std::uint32_t v[4];
  };

  static inline void round(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
                           std::uint32_t& c3, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c0;
    const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
  }

  Block operator()(std::uint64_t ctr_lo, std::uint64_t ctr_hi) const {
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
    std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
    std::uint32_t k0 = key0, k1 = key1;
    for (int r = 0; r < 10; ++r) {
      round(c0, c1, c2, c3, k0, k1);
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return Block{{c0, c1, c2, c3}};
  }
};

// Uniform in (0,1) from two 32-bit words (53-bit mantissa, both endpoints
// excluded so log() is always safe).
inline double uniform_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

struct NormalPair {
  double n1, n2;
};

// Box-Muller on one Philox block: the two channels used per simulation step.
inline NormalPair normal_pair(const Philox4x32& rng, std::uint64_t ctr_lo, std::uint64_t ctr_hi) {
  const Philox4x32::Block b = rng(ctr_lo, ctr_hi);
  const double u1 = uniform_open(b.v[0], b.v[1]);
  const double u2 = uniform_open(b.v[2], b.v[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  return NormalPair{r * std::cos(th), r * std::sin(th)};
}

// Noise pair for (path, step) in a simulation stream.
inline NormalPair step_noises(const Philox4x32& rng, std::uint64_t path, std::uint64_t step) {
  return normal_pair(rng, step, path);
}

// Independent uniform stream for samplers (stream id keeps it disjoint from
// the path streams under the same master seed).
inline double sampler_uniform(const Philox4x32& rng, std::uint64_t index) {
  const Philox4x32::Block b = rng(index, 0x53414D50ull << 32);
  return uniform_open(b.v[0], b.v[1]);
}

}  // namespace svlab
