#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace gradphi {

/// Counter-based generator (Philox4x32-10, Salmon et al. 2011). Every draw
/// is a pure function of (seed, counter), so a trajectory can be regenerated
/// site by site in any order, and serial and threaded runs agree bit for bit.
///
/// Counters are (step, slot): `step` is the time step or sweep index, `slot`
/// packs a site index with a lane tag in the top 16 bits so that different
/// uses of randomness within one step never share a counter.
class CounterRng {
 public:
  enum class Lane : std::uint64_t {
    kNoise = 0,
    kAccept = 1,
    kInit = 2,
    kAux = 3,
  };

  explicit CounterRng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  static constexpr std::uint64_t slot(std::uint64_t index, Lane lane) noexcept {
    return (index & 0x0000FFFFFFFFFFFFull) |
           (static_cast<std::uint64_t>(lane) << 48);
  }

  std::array<std::uint32_t, 4> block(std::uint64_t step,
                                     std::uint64_t slot) const noexcept {
    std::array<std::uint32_t, 4> ctr{
        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
        static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(slot >> 32)};
    std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return ctr;
  }

  /// Two independent uniforms in the open interval (0, 1).
  std::pair<double, double> uniform2(std::uint64_t step,
                                     std::uint64_t slot) const noexcept {
    const auto b = block(step, slot);
    const std::uint64_t a = (std::uint64_t{b[0]} << 32) | b[1];
    const std::uint64_t c = (std::uint64_t{b[2]} << 32) | b[3];
    return {to_unit(a), to_unit(c)};
  }

  double uniform(std::uint64_t step, std::uint64_t slot) const noexcept {
    return uniform2(step, slot).first;
  }

  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> normal2(std::uint64_t step,
                                    std::uint64_t slot) const noexcept {
    const auto [u1, u2] = uniform2(step, slot);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(angle), r * std::sin(angle)};
  }

  double normal(std::uint64_t step, std::uint64_t slot) const noexcept {
    return normal2(step, slot).first;
  }

 private:
  static double to_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed_;
};

/// Derive an independent seed for a sub-stream (chain, grid node, realization).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the combined word
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace gradphi
