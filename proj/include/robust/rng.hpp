#pragma once

// Counter-based, splittable random source.
//
// Output word c of a generator with key K is a pure function of (K, c), so a
// generator can be reconstructed from its key and position alone. Trials derive
// their keys from (master_seed, trial_index) through derive_seed(), and every
// consumer inside a trial (sampler, adversary) takes its own stream via
// CounterRng(seed, stream_id).

#include <cstdint>
#include <limits>

#include "robust/numeric.hpp"

namespace robust {

/// 128-bit generator key.
struct Seed128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend bool operator==(const Seed128&, const Seed128&) = default;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// 128-bit hash of (master_seed, index). Trial i of an experiment is keyed by
/// derive_seed(master_seed, i).
constexpr Seed128 derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  const std::uint64_t a = mix64(master_seed ^ 0x6A09E667F3BCC909ULL);
  const std::uint64_t b = mix64(index ^ 0xBB67AE8584CAA73BULL);
  return Seed128{mix64(a ^ mix64(b)), mix64(b + mix64(a ^ 0x3C6EF372FE94F82BULL))};
}

/// Well-known stream ids inside one trial.
enum class Stream : std::uint64_t { Sampler = 1, Adversary = 2, Aux = 3 };

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(Seed128 seed, std::uint64_t stream = 0) noexcept
      : key_{mix64(seed.hi ^ mix64(stream + 0xA54FF53A5F1D36F1ULL)), seed.lo} {}
  CounterRng(Seed128 seed, Stream stream) noexcept
      : CounterRng(seed, static_cast<std::uint64_t>(stream)) {}
  /// Single-word seeding, equivalent to CounterRng(derive_seed(seed, 0)).
  explicit CounterRng(std::uint64_t seed) noexcept : CounterRng(derive_seed(seed, 0)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t c = counter_++;
    return mix64(mix64(key_.lo + c * 0xD1B54A32D192ED03ULL) ^ key_.hi);
  }

  /// Exactly uniform on [0, bound); bound must be positive. Multiply-high with
  /// rejection of the short residue class.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Exactly uniform on [0, bound) for an arbitrary-precision bound.
  BigInt uniform_below(const BigInt& bound);

  /// Uniform double in [0, 1) with 53 random bits. Not used in any verdict.
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t position() const noexcept { return counter_; }

 private:
  Seed128 key_;
  std::uint64_t counter_ = 0;
};

}  // namespace robust
