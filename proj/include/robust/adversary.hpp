#pragma once

// Adversary strategies for the adaptive sampling game.
//
// An adversary sees exactly what the game hands it in AdversaryContext: the
// elements it already submitted and the sampler's state after the previous
// round. Nothing else about the sampler (in particular its random generator)
// is reachable from here.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "robust/numeric.hpp"
#include "robust/rng.hpp"
#include "robust/sampler.hpp"

namespace robust {

struct GameParams {
  std::uint64_t n = 0;
  BigInt universe_size = 1;
  Rational eps = 0;
};

struct AdversaryContext {
  std::span<const Element> prior_elements;  // x_1 .. x_{i-1}
  const SampleState& observed_state;        // sigma_{i-1}
  std::uint64_t round;                      // i = |prior_elements| + 1
  const GameParams& params;
};

class Adversary {
 public:
  virtual ~Adversary() = default;

  /// Next element, or nullopt when the strategy cannot continue (attack abort).
  virtual std::optional<Element> next(const AdversaryContext& ctx) = 0;
  virtual std::string_view name() const noexcept = 0;
};

enum class AdversaryKind { Attack, MidpointAttack, StaticSorted, StaticRandom, Constant };

std::string_view to_string(AdversaryKind kind);
AdversaryKind parse_adversary_kind(std::string_view name);

/// What the binary-search attack does once no strictly interior point is left.
enum class ExhaustionPolicy {
  Abort,     // signal failure; the game marks the trial invalid
  Continue,  // keep submitting the nearest admissible point of the collapsed window
};

std::string_view to_string(ExhaustionPolicy policy);
ExhaustionPolicy parse_exhaustion_policy(std::string_view name);

// ---- binary-search attack ----------------------------------------------------

/// Live window of the attack together with its fixed split ratio p'.
struct AttackState {
  Element a;
  Element b;
  Rational p_prime;
  std::optional<Element> last;  // previously emitted element, awaiting its outcome
};

/// max{p, ln n / n}, with ln n / n rounded up to a multiple of 10^-13 so that it
/// never understates the true value.
Rational attack_split(const Rational& p, std::uint64_t n);

/// Upper rational bound on ln(n)/n, within 10^-12.
Rational ln_ratio_upper(std::uint64_t n);

/// Initial attack state on [1, N]. Throws ConfigError unless 0 < p' < 1.
AttackState attack_start(const BigInt& universe_size, Rational p_prime);

/// floor(a + (1 - p')(b - a)), or nullopt if that point is not strictly inside (a, b).
std::optional<Element> attack_point(const AttackState& state);

struct AttackStep {
  std::optional<Element> element;  // nullopt: window exhausted
  AttackState state;
};

/// Applies the outcome of the previously emitted element (sampled => a = x_prev,
/// otherwise b = x_prev), then emits the next point of the updated window.
/// `was_sampled` is ignored on the first call.
AttackStep attack_step(AttackState state, bool was_sampled);

/// Default universe for attack experiments: 2^ceil(6 (ln n)^2), clamped to at
/// most 2^floor(n/2).
BigInt default_attack_universe(std::uint64_t n);

class BinarySearchAttack final : public Adversary {
 public:
  BinarySearchAttack(const BigInt& universe_size, Rational p_prime,
                     ExhaustionPolicy policy = ExhaustionPolicy::Abort);

  std::optional<Element> next(const AdversaryContext& ctx) override;
  std::string_view name() const noexcept override { return "attack"; }

  const AttackState& state() const noexcept { return state_; }
  bool exhausted() const noexcept { return exhausted_; }

 private:
  AttackState state_;
  ExhaustionPolicy policy_;
  std::uint64_t seen_sampled_ = 0;
  bool exhausted_ = false;
};

// ---- continuous-domain midpoint attack --------------------------------------

struct MidpointState {
  Rational a = 0;
  Rational b = 1;
  std::optional<Rational> last;
};

struct MidpointStep {
  Rational element;
  MidpointState state;
};

/// Updates the window with the outcome of the previous midpoint, then emits
/// (a + b) / 2.
MidpointStep midpoint_attack_step(MidpointState state, bool was_sampled);

/// The midpoint attack over [0,1] embedded into [1, 2^n] by scaling with 2^n;
/// every dyadic midpoint of the first n rounds maps to an integer.
class MidpointAttack final : public Adversary {
 public:
  explicit MidpointAttack(std::uint64_t n);

  std::optional<Element> next(const AdversaryContext& ctx) override;
  std::string_view name() const noexcept override { return "midpoint-attack"; }

  const MidpointState& state() const noexcept { return state_; }

 private:
  MidpointState state_;
  BigInt scale_;
  std::uint64_t seen_sampled_ = 0;
};

// ---- static baselines --------------------------------------------------------

class ConstantAdversary final : public Adversary {
 public:
  explicit ConstantAdversary(Element value) : value_(std::move(value)) {}
  std::optional<Element> next(const AdversaryContext&) override { return value_; }
  std::string_view name() const noexcept override { return "constant"; }

 private:
  Element value_;
};

/// Submits 1, 2, ..., n.
class SortedStaticAdversary final : public Adversary {
 public:
  std::optional<Element> next(const AdversaryContext& ctx) override { return Element(ctx.round); }
  std::string_view name() const noexcept override { return "static-sorted"; }
};

/// Uniform elements of [1, N] drawn from the adversary's own generator.
class StaticRandomAdversary final : public Adversary {
 public:
  explicit StaticRandomAdversary(CounterRng rng) : rng_(rng) {}
  std::optional<Element> next(const AdversaryContext& ctx) override;
  std::string_view name() const noexcept override { return "static-random"; }

 private:
  CounterRng rng_;
};

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::Attack;
  Element constant = 1;
  ExhaustionPolicy on_exhaust = ExhaustionPolicy::Abort;
  std::optional<Rational> p_prime;  // overrides max{p, ln n / n} for the attack
};

/// The fraction of the stream the attack expects to be sampled: p for Bernoulli,
/// k/n for the reservoir.
Rational attack_sampling_rate(const SamplerConfig& sampler, std::uint64_t n);

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, const SamplerConfig& sampler,
                                          const GameParams& params, CounterRng rng);

}  // namespace robust
