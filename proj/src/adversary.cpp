#include "robust/adversary.hpp"

#include <algorithm>
#include <cmath>

namespace robust {

std::string_view to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::Attack: return "attack";
    case AdversaryKind::MidpointAttack: return "midpoint-attack";
    case AdversaryKind::StaticSorted: return "static-sorted";
    case AdversaryKind::StaticRandom: return "static-random";
    case AdversaryKind::Constant: return "constant";
  }
  return "?";
}

AdversaryKind parse_adversary_kind(std::string_view name) {
  if (name == "attack") return AdversaryKind::Attack;
  if (name == "midpoint-attack") return AdversaryKind::MidpointAttack;
  if (name == "static-sorted") return AdversaryKind::StaticSorted;
  if (name == "static-random") return AdversaryKind::StaticRandom;
  if (name == "constant") return AdversaryKind::Constant;
  throw ConfigError("adversary: expected attack|midpoint-attack|static-sorted|static-random|constant, got '" +
                    std::string(name) + "'");
}

std::string_view to_string(ExhaustionPolicy policy) {
  return policy == ExhaustionPolicy::Abort ? "abort" : "continue";
}

ExhaustionPolicy parse_exhaustion_policy(std::string_view name) {
  if (name == "abort") return ExhaustionPolicy::Abort;
  if (name == "continue") return ExhaustionPolicy::Continue;
  throw ConfigError("on-exhaust: expected 'abort' or 'continue', got '" + std::string(name) + "'");
}

Rational ln_ratio_upper(std::uint64_t n) {
  if (n == 0) throw DomainError("ln n / n needs n >= 1");
  // 50-digit evaluation, then one extra unit at 10^-13 to absorb its error.
  const HighFloat value = boost::multiprecision::log(HighFloat(n)) / HighFloat(n);
  return round_up(value, 13) + Rational(1, BigInt("10000000000000"));
}

Rational attack_split(const Rational& p, std::uint64_t n) {
  Rational bound = ln_ratio_upper(n);
  return p > bound ? p : bound;
}

AttackState attack_start(const BigInt& universe_size, Rational p_prime) {
  if (p_prime <= 0 || p_prime >= 1) throw ConfigError("attack: p' must lie strictly between 0 and 1, got " +
                                                      to_string(p_prime));
  if (universe_size < 1) throw ConfigError("N: universe size must be at least 1");
  return AttackState{1, universe_size, std::move(p_prime), std::nullopt};
}

std::optional<Element> attack_point(const AttackState& s) {
  if (s.b - s.a < 2) return std::nullopt;
  const Rational keep = Rational(1) - s.p_prime;
  const BigInt offset = (boost::multiprecision::numerator(keep) * (s.b - s.a)) /
                        boost::multiprecision::denominator(keep);
  Element x = s.a + offset;
  if (x <= s.a || x >= s.b) return std::nullopt;
  return x;
}

AttackStep attack_step(AttackState state, bool was_sampled) {
  if (state.last) {
    if (was_sampled) state.a = *state.last;
    else state.b = *state.last;
    state.last.reset();
  }
  auto x = attack_point(state);
  if (x) state.last = *x;
  return {std::move(x), std::move(state)};
}

BigInt default_attack_universe(std::uint64_t n) {
  const HighFloat l = boost::multiprecision::log(HighFloat(n));
  const auto wanted = (boost::multiprecision::ceil(6 * l * l)).convert_to<std::uint64_t>();
  const std::uint64_t cap = n / 2;
  return pow2(static_cast<unsigned>(std::min(std::max<std::uint64_t>(wanted, 1), std::max<std::uint64_t>(cap, 1))));
}

BinarySearchAttack::BinarySearchAttack(const BigInt& universe_size, Rational p_prime, ExhaustionPolicy policy)
    : state_(attack_start(universe_size, std::move(p_prime))), policy_(policy) {}

std::optional<Element> BinarySearchAttack::next(const AdversaryContext& ctx) {
  // The previous element was accepted iff the acceptance counter moved.
  const bool sampled = ctx.observed_state.ever_sampled > seen_sampled_;
  seen_sampled_ = ctx.observed_state.ever_sampled;
  auto step = attack_step(std::move(state_), sampled);
  state_ = std::move(step.state);
  if (step.element) return step.element;

  exhausted_ = true;
  if (policy_ == ExhaustionPolicy::Abort) return std::nullopt;
  // Collapsed window: stay on its nearest admissible point.
  Element x = state_.b - state_.a >= 2 ? Element(state_.a + 1) : state_.a;
  if (x < 1) x = 1;
  state_.last = x;
  return x;
}

MidpointStep midpoint_attack_step(MidpointState state, bool was_sampled) {
  if (state.last) {
    if (was_sampled) state.a = *state.last;
    else state.b = *state.last;
  }
  Rational x = (state.a + state.b) / 2;
  state.last = x;
  return {std::move(x), std::move(state)};
}

MidpointAttack::MidpointAttack(std::uint64_t n) : scale_(pow2(static_cast<unsigned>(n))) {
  if (n == 0 || n > 1'000'000) throw ConfigError("midpoint-attack: n must lie in [1, 10^6]");
}

std::optional<Element> MidpointAttack::next(const AdversaryContext& ctx) {
  const bool sampled = ctx.observed_state.ever_sampled > seen_sampled_;
  seen_sampled_ = ctx.observed_state.ever_sampled;
  auto step = midpoint_attack_step(std::move(state_), sampled);
  state_ = std::move(step.state);
  const Rational scaled = step.element * Rational(scale_);
  return floor(scaled);
}

std::optional<Element> StaticRandomAdversary::next(const AdversaryContext& ctx) {
  return rng_.uniform_below(ctx.params.universe_size) + 1;
}

Rational attack_sampling_rate(const SamplerConfig& sampler, std::uint64_t n) {
  if (sampler.kind == SamplerKind::Bernoulli) return sampler.p;
  if (n == 0) return 1;
  Rational rate(BigInt(sampler.k), BigInt(n));
  return rate > 1 ? Rational(1) : rate;
}

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, const SamplerConfig& sampler,
                                          const GameParams& params, CounterRng rng) {
  switch (spec.kind) {
    case AdversaryKind::Attack: {
      Rational split = spec.p_prime ? *spec.p_prime : attack_split(attack_sampling_rate(sampler, params.n), params.n);
      // A sampler that keeps everything leaves no split to exploit; fall back to halving.
      if (!spec.p_prime && split >= 1) split = Rational(1, 2);
      return std::make_unique<BinarySearchAttack>(params.universe_size, std::move(split), spec.on_exhaust);
    }
    case AdversaryKind::MidpointAttack:
      if (params.universe_size < pow2(static_cast<unsigned>(std::min<std::uint64_t>(params.n, 1'000'000))))
        throw ConfigError("midpoint-attack: universe size N must be at least 2^n");
      return std::make_unique<MidpointAttack>(params.n);
    case AdversaryKind::StaticSorted:
      if (params.universe_size < params.n) throw ConfigError("static-sorted: universe size N must be at least n");
      return std::make_unique<SortedStaticAdversary>();
    case AdversaryKind::StaticRandom:
      return std::make_unique<StaticRandomAdversary>(rng);
    case AdversaryKind::Constant:
      if (spec.constant < 1 || spec.constant > params.universe_size)
        throw ConfigError("constant: value must lie in [1, N]");
      return std::make_unique<ConstantAdversary>(spec.constant);
  }
  throw ConfigError("unknown adversary");
}

}  // namespace robust
