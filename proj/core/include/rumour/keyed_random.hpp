#pragma once

#include <cstdint>
#include <limits>

namespace rumour {

// Counter-based randomness. Every uniform used by the engines is a pure
// function of (seed, key...), so coupled processes that read the same key see
// the same value regardless of evaluation order.

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
  return mix64(h ^ mix64(v + 0x632be59bd9b4e019ULL));
}

template <typename... Keys>
constexpr std::uint64_t keyed_bits(std::uint64_t seed, Keys... keys) noexcept {
  std::uint64_t h = mix64(seed);
  ((h = hash_combine(h, static_cast<std::uint64_t>(keys))), ...);
  return h;
}

/// Maps 64 random bits to [0, 1) with 53-bit resolution.
inline constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template <typename... Keys>
constexpr double keyed_uniform(std::uint64_t seed, Keys... keys) noexcept {
  return to_unit(keyed_bits(seed, keys...));
}

/// Independent sub-seeds for replicates and purposes.
enum class Purpose : std::uint64_t {
  Replicate = 1,
  RadiusField = 2,
  SiteField = 3,
  Overshoot = 4,
  ReactRadius = 5,
  ReactClock = 6,
  Sequential = 7,
  Permutation = 8,
  Centering = 9,
};

inline constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index,
                                          Purpose purpose = Purpose::Replicate) noexcept {
  return keyed_bits(master, index, static_cast<std::uint64_t>(purpose));
}

/// Small sequential generator (SplitMix64) satisfying UniformRandomBitGenerator.
/// Used where draws are consumed in a fixed order (overshoot samples, synthetic data).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr double uniform() noexcept { return to_unit((*this)()); }

 private:
  std::uint64_t state_;
};

}  // namespace rumour
