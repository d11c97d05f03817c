#include "robust/sampler.hpp"

#include <algorithm>

namespace robust {

std::string_view to_string(SamplerKind kind) {
  return kind == SamplerKind::Bernoulli ? "bernoulli" : "reservoir";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "bernoulli") return SamplerKind::Bernoulli;
  if (name == "reservoir") return SamplerKind::Reservoir;
  throw ConfigError("sampler: expected 'bernoulli' or 'reservoir', got '" + std::string(name) + "'");
}

void SamplerConfig::validate() const {
  if (kind == SamplerKind::Bernoulli) {
    if (p < 0 || p > 1) throw ConfigError("p: must lie in [0,1], got " + to_string(p));
  } else if (k == 0) {
    throw ConfigError("k: reservoir capacity must be at least 1");
  }
}

unsigned __int128 bernoulli_threshold(const Rational& p) {
  const BigInt scaled = floor(p * Rational(pow2(64)));
  if (scaled <= 0) return 0;
  const BigInt one = pow2(64);
  if (scaled >= one) return static_cast<unsigned __int128>(1) << 64;
  return static_cast<unsigned __int128>(scaled.convert_to<std::uint64_t>());
}

Sampler::Sampler(SamplerConfig config) : Sampler(config, CounterRng(config.rng_seed)) {}

Sampler::Sampler(SamplerConfig config, CounterRng rng)
    : config_(std::move(config)), rng_(rng) {
  config_.validate();
  if (config_.kind == SamplerKind::Bernoulli) {
    bernoulli_threshold_ = bernoulli_threshold(config_.p);
  } else {
    state_.held.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(config_.k, 1u << 20)));
  }
}

StepOutcome Sampler::step(const Element& x) {
  return config_.kind == SamplerKind::Bernoulli ? bernoulli_step(x) : reservoir_step(x);
}

StepOutcome Sampler::bernoulli_step(const Element& x) {
  ++state_.round;
  // One draw per element, whatever p is.
  const std::uint64_t u = rng_.next_u64();
  if (static_cast<unsigned __int128>(u) >= bernoulli_threshold_) return {};
  state_.held.push_back(x);
  ++state_.ever_sampled;
  return {true, state_.held.size() - 1, std::nullopt};
}

StepOutcome Sampler::reservoir_step(const Element& x) {
  const std::uint64_t i = ++state_.round;
  if (i <= config_.k) {
    state_.held.push_back(x);
    ++state_.ever_sampled;
    return {true, state_.held.size() - 1, std::nullopt};
  }
  // j uniform on [0, i): accept iff j < k, which happens with probability
  // exactly k/i, and conditioned on acceptance j is uniform over the k slots.
  const std::uint64_t j = rng_.uniform_below(i);
  if (j >= config_.k) return {};
  StepOutcome out{true, static_cast<std::size_t>(j), std::move(state_.held[j])};
  state_.held[j] = x;
  ++state_.ever_sampled;
  return out;
}

}  // namespace robust
