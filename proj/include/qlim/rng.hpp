#ifndef QLIM_RNG_HPP_
#define QLIM_RNG_HPP_

#include <array>
#include <cstdint>

namespace qlim {

// SplitMix64 output finalizer (Steele, Lea, Flood 2014).  A bijection on
// 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Per-replication seed: splitmix64_mix(master + (rep + 1) * golden gamma).
// Stateless, so replications can run in any order; distinct indices
// (below 2^64) give distinct seeds because the gamma is odd and the mix is
// a bijection.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t rep_index) {
  return splitmix64_mix(master_seed + (rep_index + 1) * kGoldenGamma);
}

// xoshiro256** 1.0 (Blackman, Vigna), state filled from a SplitMix64
// sequence started at the seed.  Pinned: changing the algorithm changes
// every recorded trajectory.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : s_) {
      x += kGoldenGamma;
      word = splitmix64_mix(x);
    }
  }

  // Raw state, for checking against reference vectors.
  static constexpr Xoshiro256 from_state(const std::array<std::uint64_t, 4>& s) {
    Xoshiro256 g(0);
    g.s_ = s;
    return g;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  constexpr result_type operator()() {
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

  // Uniform double in the open interval (0, 1): the top 53 bits, offset by
  // half a step so neither endpoint can occur.
  constexpr double uniform01() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace qlim

#endif  // QLIM_RNG_HPP_
