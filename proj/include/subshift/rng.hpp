/// @file rng.hpp
/// @brief Seed derivation and the deterministic random stream used everywhere.
///
/// Every randomized operation in this library is a pure function of its
/// inputs and a 64-bit seed. Seeds for nested work units (repetitions,
/// permutations, folds) are derived from a root seed and an integer path,
/// so parallel schedules never share generator state.

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace subshift {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// Salt applied to path elements before hashing; keeps the element-hash
/// domain disjoint from the root-hash domain, so a path element can never
/// cancel the running state at small integer inputs.
inline constexpr std::uint64_t kElementSalt = 0xD1B54A32D192ED03ull;

/// SplitMix64 finalizer: adds the golden-ratio increment and applies the
/// standard avalanche (xor-shift-multiply) rounds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives a child seed from a root seed and an integer path. Definition:
/// s = mix64(root); for each element e: s = mix64(s ^ mix64(e ^ salt)).
constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::span<const std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(root);
  for (std::uint64_t e : path) s = mix64(s ^ mix64(e ^ kElementSalt));
  return s;
}

inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) noexcept {
  return derive_seed(root, std::span<const std::uint64_t>(path.begin(), path.size()));
}

/// A root seed plus the path that addresses one work unit below it.
struct SeedPath {
  std::uint64_t root_seed = 0;
  std::vector<std::uint64_t> path;

  [[nodiscard]] std::uint64_t resolve() const noexcept {
    return derive_seed(root_seed, std::span<const std::uint64_t>(path));
  }
};

/// SplitMix64 stream generator. Small state, full 64-bit output, and —
/// unlike the std distributions — every derived quantity below has a fixed,
/// documented construction, so streams are byte-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += kGoldenGamma;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1): top 53 bits scaled by 2^-53.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Unbiased via rejection of the partial block.
  std::uint64_t uniform_int(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0ull - n) % n;  // 2^64 mod n
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r < threshold);
    return r % n;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller. Always consumes exactly two uniforms.
  double normal() noexcept {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double uniform_range(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Fisher-Yates shuffle, descending index order.
  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace subshift
