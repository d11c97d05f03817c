#pragma once

// Streaming samplers: Bernoulli(p) and reservoir(k).
//
// Both keep the sample as an ordered multiset. For the reservoir, position j of
// `held` is slot j of the memory, so an overwrite replaces exactly that slot.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robust/numeric.hpp"
#include "robust/rng.hpp"

namespace robust {

enum class SamplerKind { Bernoulli, Reservoir };

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(std::string_view name);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::Reservoir;
  Rational p = 0;         // Bernoulli inclusion probability
  std::uint64_t k = 1;    // reservoir capacity
  std::uint64_t rng_seed = 0;

  static SamplerConfig bernoulli(Rational p, std::uint64_t seed = 0) {
    return {SamplerKind::Bernoulli, std::move(p), 1, seed};
  }
  static SamplerConfig reservoir(std::uint64_t k, std::uint64_t seed = 0) {
    return {SamplerKind::Reservoir, 0, k, seed};
  }

  /// Throws ConfigError when p is outside [0,1] or k == 0.
  void validate() const;
};

struct SampleState {
  std::vector<Element> held;
  std::uint64_t round = 0;         // elements consumed so far
  std::uint64_t ever_sampled = 0;  // acceptances, including later-evicted ones
};

/// What happened to the element passed to Sampler::step.
struct StepOutcome {
  bool accepted = false;
  std::optional<std::size_t> slot;      // position written in `held`
  std::optional<Element> evicted;       // reservoir overwrite victim
};

class Sampler {
 public:
  /// Seeds the generator from config.rng_seed.
  explicit Sampler(SamplerConfig config);
  Sampler(SamplerConfig config, CounterRng rng);

  StepOutcome step(const Element& x);

  const SampleState& state() const noexcept { return state_; }
  std::span<const Element> sample() const noexcept { return state_.held; }
  const SamplerConfig& config() const noexcept { return config_; }

 private:
  StepOutcome bernoulli_step(const Element& x);
  StepOutcome reservoir_step(const Element& x);

  SamplerConfig config_;
  CounterRng rng_;
  SampleState state_;
  // floor(p * 2^64); 2^64 encodes p == 1.
  unsigned __int128 bernoulli_threshold_ = 0;
};

/// The sample S_i held by a state.
inline std::span<const Element> current_sample(const SampleState& state) noexcept {
  return state.held;
}

/// floor(p * 2^64) for p in [0,1]. A uniform 64-bit word u is accepted iff
/// u < threshold, so the realised probability is within 2^-64 of p.
unsigned __int128 bernoulli_threshold(const Rational& p);

}  // namespace robust
