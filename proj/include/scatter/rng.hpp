#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace scatter {

/// Stream tags used when deriving per-task seeds, so that estimator noise,
/// oracle noise and frequency draws never share a random stream.
namespace seed_domain {
inline constexpr std::uint64_t estimator = 0x45535449u;
inline constexpr std::uint64_t oracle = 0x4f52434cu;
inline constexpr std::uint64_t frequency = 0x46524551u;
inline constexpr std::uint64_t process = 0x50524f43u;
} // namespace seed_domain

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
} // namespace detail

/// Derives an independent seed for worker `index` of stream `domain`.
/// Replicate r of any estimator uses derive_seed(master, domain, r), so
/// replicates can be generated on parallel workers in any order while the
/// produced numbers stay identical to a serial run.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain,
                                 std::uint64_t index) {
  return detail::splitmix64(detail::splitmix64(detail::splitmix64(master) ^ domain) ^ index);
}

/// xoshiro256++ with a splitmix64-expanded seed. Self-contained so that
/// streams are reproducible independently of the standard library in use.
class Rng {
public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& word : state_) {
      z = detail::splitmix64(z);
      word = z;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe to pass to log().
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Uniform on (lo, hi).
  double uniform_open(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }

  /// Standard normal via Box-Muller. Two uniforms per draw, no cached state.
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

} // namespace scatter
