#pragma once

#include <cstdint>
#include <limits>

namespace evpix {

/// SplitMix64 finalizer, used to turn (seed, x, y, stream) tuples into
/// decorrelated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Which per-pixel random stream a seed is derived for.
enum class RngStream : std::uint64_t { Noise = 1, Mismatch = 2 };

constexpr std::uint64_t pixel_seed(std::uint64_t seed, std::uint32_t x, std::uint32_t y,
                                   RngStream stream) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(y) << 32 | x));
  return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

/// xoshiro256+ (Blackman & Vigna). 32 bytes of state, which keeps one engine
/// per pixel affordable on full-size arrays. Satisfies
/// UniformRandomBitGenerator.
class Xoshiro256Plus {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256Plus(std::uint64_t seed = 0) { this->seed(seed); }

  void seed(std::uint64_t seed) {
    for (auto& word : state_) {
      seed = splitmix64(seed);
      word = seed;
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = state_[0] + state_[3];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = (state_[3] << 45) | (state_[3] >> 19);
    return result;
  }

  bool operator==(const Xoshiro256Plus&) const = default;

 private:
  std::uint64_t state_[4]{};
};

}  // namespace evpix
