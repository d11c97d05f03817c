#pragma once

// The adaptive sampling game and its continuous variant, plus a Monte Carlo
// driver that estimates the failure probability over independent trials.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "robust/adversary.hpp"
#include "robust/numeric.hpp"
#include "robust/sampler.hpp"
#include "robust/set_system.hpp"

namespace robust {

/// How often the continuous game verifies the sample.
enum class CheckSchedule {
  EveryRound,   // the definition: after every round
  Checkpoints,  // proxy: only at rounds k = i_1 < i_2 < ... with i_{j+1} <= (1 + eps/4) i_j, and at n
};

struct GameConfig {
  std::uint64_t n = 1;
  Rational eps = Rational(1, 10);
  SetSystem system = SetSystem::prefix(1);
  SamplerConfig sampler;
  AdversarySpec adversary;
  bool continuous = false;
  CheckSchedule schedule = CheckSchedule::EveryRound;
  std::uint64_t trial_seed = 0;   // master seed
  std::uint64_t trial_index = 0;  // the game is keyed by derive_seed(trial_seed, trial_index)
  bool record_digests = false;    // per-round sample digests in the transcript

  /// Throws ConfigError on n == 0, eps outside (0,1) or a bad sampler config.
  void validate() const;
};

struct RoundRecord {
  Element element;
  bool sampled = false;
  std::uint64_t sample_digest = 0;  // 0 unless GameConfig::record_digests
};

struct GameTranscript {
  std::vector<RoundRecord> rounds;
  std::optional<int> verdict;                // absent when the attack aborted
  std::optional<std::uint64_t> failure_round;  // continuous game only
  std::optional<Range> witness;
  std::optional<Rational> gap;
  bool aborted = false;
  std::optional<std::uint64_t> abort_round;
  std::vector<Element> final_sample;
  std::uint64_t ever_sampled = 0;

  bool valid() const noexcept { return !aborted; }
  std::vector<Element> stream() const;
};

/// FNV-1a over the sample's elements, position-sensitive.
std::uint64_t sample_digest(std::span<const Element> sample);

/// n rounds, then verdict 1 iff the final sample is an eps-approximation of the
/// stream. An empty final sample gets verdict 0.
GameTranscript run_adaptive_game(const GameConfig& cfg);

/// Checks the sample after every round (or at checkpoints, see CheckSchedule)
/// and halts with verdict 0 at the first failure.
GameTranscript run_continuous_game(const GameConfig& cfg);

/// Dispatches on cfg.continuous.
GameTranscript run_game(const GameConfig& cfg);

/// Rounds checked by CheckSchedule::Checkpoints: i_1 = min(k, n), then
/// i_{j+1} = the largest integer <= min(n, (1 + beta) i_j), forced to advance
/// by at least one; always ends at n.
std::vector<std::uint64_t> checkpoint_rounds(std::uint64_t k, std::uint64_t n, const Rational& beta);

struct WilsonInterval {
  double lo = 0;
  double hi = 1;
};

/// 95% Wilson score interval for `failures` out of `trials`.
WilsonInterval wilson_interval(std::uint64_t failures, std::uint64_t trials);

struct MonteCarloSummary {
  std::uint64_t trials = 0;
  std::uint64_t valid_trials = 0;
  std::uint64_t failures = 0;
  std::uint64_t aborts = 0;
  Rational delta_hat = 0;
  WilsonInterval wilson;
};

struct MonteCarloOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  /// Called once per trial with (trial_index, transcript); calls are
  /// serialised but arrive in completion order.
  std::function<void(std::uint64_t, const GameTranscript&)> observer;
};

/// Independent games keyed by derive_seed(master_seed, i), i < trials.
/// Aborted trials are excluded from delta_hat. Throws EstimationError when no
/// trial is valid.
MonteCarloSummary monte_carlo(GameConfig cfg, std::uint64_t trials, std::uint64_t master_seed,
                              const MonteCarloOptions& options = {});

}  // namespace robust
