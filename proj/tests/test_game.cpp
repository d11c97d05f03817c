#include <gtest/gtest.h>

#include <atomic>
#include <set>

#include "robust/game.hpp"
#include "robust/serialization.hpp"

using namespace robust;

namespace {

GameConfig base_game(std::uint64_t n, SetSystem system, SamplerConfig sampler, AdversaryKind adv) {
  GameConfig cfg;
  cfg.n = n;
  cfg.eps = Rational(1, 5);
  cfg.system = std::move(system);
  cfg.sampler = std::move(sampler);
  cfg.adversary.kind = adv;
  cfg.adversary.on_exhaust = ExhaustionPolicy::Continue;
  return cfg;
}

}  // namespace

TEST(Game, ValidatesConfig) {
  auto cfg = base_game(10, SetSystem::prefix(10), SamplerConfig::reservoir(2), AdversaryKind::StaticSorted);
  cfg.n = 0;
  EXPECT_THROW(run_game(cfg), ConfigError);
  cfg.n = 10;
  cfg.eps = 1;
  EXPECT_THROW(run_game(cfg), ConfigError);
  cfg.eps = Rational(1, 5);
  cfg.sampler.k = 0;
  EXPECT_THROW(run_game(cfg), ConfigError);
}

TEST(Game, FullReservoirAlwaysWins) {
  for (auto adv : {AdversaryKind::Attack, AdversaryKind::StaticRandom, AdversaryKind::StaticSorted}) {
    auto cfg = base_game(50, SetSystem::intervals(1000), SamplerConfig::reservoir(100), adv);
    for (bool continuous : {false, true}) {
      cfg.continuous = continuous;
      const auto t = run_game(cfg);
      ASSERT_TRUE(t.verdict);
      EXPECT_EQ(*t.verdict, 1);
      EXPECT_EQ(t.rounds.size(), 50u);
      EXPECT_EQ(t.final_sample, t.stream());
    }
    const auto s = monte_carlo(cfg, 20, 3);
    EXPECT_EQ(s.delta_hat, 0);
  }
}

TEST(Game, EmptySampleLoses) {
  auto cfg = base_game(10, SetSystem::prefix(100), SamplerConfig::bernoulli(0), AdversaryKind::StaticRandom);
  const auto t = run_adaptive_game(cfg);
  ASSERT_TRUE(t.verdict);
  EXPECT_EQ(*t.verdict, 0);
  EXPECT_TRUE(t.final_sample.empty());
  ASSERT_TRUE(t.witness);
  const auto s = monte_carlo(cfg, 10, 1);
  EXPECT_EQ(s.delta_hat, 1);
  EXPECT_EQ(s.failures, 10u);

  cfg.continuous = true;
  const auto c = run_continuous_game(cfg);
  EXPECT_EQ(c.failure_round, 1u);
}

TEST(Game, ContinuousSingletonsFailWhenFirstElementIsSkipped) {
  auto cfg = base_game(30, SetSystem::singletons(1000), SamplerConfig::bernoulli(Rational(9, 10)),
                       AdversaryKind::StaticRandom);
  cfg.continuous = true;
  int skipped = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    cfg.trial_index = i;
    const auto t = run_continuous_game(cfg);
    if (t.rounds.front().sampled) continue;
    ++skipped;
    EXPECT_EQ(t.verdict, 0);
    EXPECT_EQ(t.failure_round, 1u);
    EXPECT_EQ(t.rounds.size(), 1u);
    ASSERT_TRUE(t.witness);
    EXPECT_EQ(*t.witness, Range{SingletonRange{t.rounds.front().element}});
  }
  EXPECT_GT(skipped, 5);
}

TEST(Game, VerdictIsRecomputableFromTranscript) {
  CounterRng rng(derive_seed(31, 0), Stream::Aux);
  const SystemKind kinds[] = {SystemKind::PrefixIntervals, SystemKind::AllIntervals, SystemKind::Singletons,
                              SystemKind::AxisBoxes};
  for (int it = 0; it < 80; ++it) {
    const auto kind = kinds[it % 4];
    const SetSystem sys = kind == SystemKind::AxisBoxes       ? SetSystem::boxes(6, 2)
                          : kind == SystemKind::PrefixIntervals ? SetSystem::prefix(64)
                          : kind == SystemKind::AllIntervals    ? SetSystem::intervals(64)
                                                                : SetSystem::singletons(64);
    auto cfg = base_game(40, sys, it % 3 ? SamplerConfig::reservoir(1 + rng.uniform_below(12))
                                         : SamplerConfig::bernoulli(Rational(1, 4)),
                         it % 2 ? AdversaryKind::Attack : AdversaryKind::StaticRandom);
    cfg.trial_seed = static_cast<std::uint64_t>(it);
    const auto t = run_adaptive_game(cfg);
    ASSERT_FALSE(t.aborted);
    ASSERT_EQ(t.rounds.size(), 40u);
    if (t.final_sample.empty()) {
      EXPECT_EQ(t.verdict, 0);
      continue;
    }
    const auto v = is_eps_approximation(t.final_sample, t.stream(), sys, cfg.eps);
    EXPECT_EQ(*t.verdict, v.ok ? 1 : 0);
    EXPECT_EQ(*t.gap, v.gap);
  }
}

TEST(Game, ContinuousWinImpliesTerminalWin) {
  for (std::uint64_t i = 0; i < 60; ++i) {
    auto cfg = base_game(120, SetSystem::prefix(500), SamplerConfig::reservoir(40), AdversaryKind::Attack);
    cfg.eps = Rational(3, 10);
    cfg.trial_index = i;
    cfg.continuous = true;
    const auto c = run_game(cfg);
    cfg.continuous = false;
    const auto a = run_game(cfg);
    if (c.verdict == 1) EXPECT_EQ(a.verdict, 1);
    if (c.verdict == 1) EXPECT_EQ(c.stream(), a.stream());
  }
}

TEST(Game, IncrementalContinuousCheckAgreesWithFullRecheck) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    auto cfg = base_game(80, SetSystem::intervals(200), SamplerConfig::reservoir(15), AdversaryKind::StaticRandom);
    cfg.eps = Rational(2, 5);
    cfg.trial_index = i;
    cfg.continuous = true;
    const auto t = run_game(cfg);
    // Recheck every prefix from scratch.
    Sampler replay(cfg.sampler, CounterRng(derive_seed(cfg.trial_seed, i), Stream::Sampler));
    std::vector<Element> stream;
    std::optional<std::uint64_t> first_fail;
    for (const auto& r : t.rounds) {
      stream.push_back(r.element);
      replay.step(r.element);
      if (!is_eps_approximation(replay.sample(), stream, cfg.system, cfg.eps).ok) {
        first_fail = stream.size();
        break;
      }
    }
    EXPECT_EQ(t.failure_round, first_fail);
  }
}

TEST(Game, SeedDeterminism) {
  auto cfg = base_game(200, SetSystem::prefix(pow2(80)), SamplerConfig::reservoir(10), AdversaryKind::Attack);
  cfg.record_digests = true;
  cfg.trial_seed = 5;
  cfg.trial_index = 2;
  EXPECT_EQ(transcript_to_json(run_game(cfg)).dump(), transcript_to_json(run_game(cfg)).dump());
  cfg.trial_index = 3;
  const auto other = transcript_to_json(run_game(cfg)).dump();
  cfg.trial_index = 2;
  EXPECT_NE(transcript_to_json(run_game(cfg)).dump(), other);
}

TEST(Game, SampleDigestIsPositionSensitive) {
  const std::vector<Element> a{Element(1), Element(2)}, b{Element(2), Element(1)};
  EXPECT_NE(sample_digest(a), sample_digest(b));
  EXPECT_EQ(sample_digest(a), sample_digest(std::vector<Element>{Element(1), Element(2)}));
}

TEST(Game, AdversaryOutsideUniverseIsRejected) {
  auto cfg = base_game(10, SetSystem::prefix(5), SamplerConfig::reservoir(2), AdversaryKind::StaticSorted);
  EXPECT_THROW(run_game(cfg), ConfigError);
}

TEST(Game, AttackDependsOnlyOnItsContext) {
  // Two attackers driven with identical contexts emit identical elements.
  BinarySearchAttack a(pow2(40), Rational(1, 5)), b(pow2(40), Rational(1, 5));
  GameParams params{100, pow2(40), Rational(1, 5)};
  SampleState state;
  std::vector<Element> prior;
  CounterRng coin(12);
  for (std::uint64_t i = 1; i <= 100; ++i) {
    const AdversaryContext ctx{prior, state, i, params};
    const auto xa = a.next(ctx);
    const auto xb = b.next(ctx);
    ASSERT_EQ(xa, xb);
    if (!xa) break;
    prior.push_back(*xa);
    if (coin.uniform_below(std::uint64_t{5}) == 0) {
      state.held.push_back(*xa);
      ++state.ever_sampled;
    }
    ++state.round;
  }
}

TEST(Checkpoints, ScheduleShape) {
  for (std::uint64_t k : {1ULL, 5ULL, 50ULL, 3000ULL}) {
    for (const Rational& beta : {Rational(1, 20), Rational(1, 4), Rational(1)}) {
      const auto r = checkpoint_rounds(k, 2000, beta);
      ASSERT_FALSE(r.empty());
      EXPECT_EQ(r.front(), std::min<std::uint64_t>(k, 2000));
      EXPECT_EQ(r.back(), 2000u);
      for (std::size_t j = 1; j < r.size(); ++j) {
        EXPECT_GT(r[j], r[j - 1]);
        const bool bounded = Rational(static_cast<std::int64_t>(r[j])) <=
                             (1 + beta) * Rational(static_cast<std::int64_t>(r[j - 1]));
        EXPECT_TRUE(bounded || r[j] == r[j - 1] + 1);
      }
    }
  }
  EXPECT_EQ(checkpoint_rounds(4, 10, Rational(1, 2)), (std::vector<std::uint64_t>{4, 6, 9, 10}));
}

TEST(Checkpoints, ProxyRunsOnlyAtScheduledRounds) {
  auto cfg = base_game(400, SetSystem::prefix(1000), SamplerConfig::reservoir(20), AdversaryKind::Attack);
  cfg.continuous = true;
  cfg.schedule = CheckSchedule::Checkpoints;
  const auto rounds = checkpoint_rounds(20, 400, cfg.eps / 4);
  const std::set<std::uint64_t> scheduled(rounds.begin(), rounds.end());
  for (std::uint64_t i = 0; i < 30; ++i) {
    cfg.trial_index = i;
    const auto t = run_game(cfg);
    if (t.failure_round) EXPECT_TRUE(scheduled.count(*t.failure_round));
  }
}

TEST(MonteCarlo, WilsonInterval) {
  auto w = wilson_interval(5, 10);
  EXPECT_NEAR(w.lo, 0.23659309051256394, 1e-12);
  EXPECT_NEAR(w.hi, 0.7634069094874361, 1e-12);
  w = wilson_interval(0, 10);
  EXPECT_EQ(w.lo, 0);
  EXPECT_NEAR(w.hi, 0.27753279986288926, 1e-12);
  w = wilson_interval(3, 200);
  EXPECT_NEAR(w.lo, 0.005114237793258307, 1e-12);
  EXPECT_NEAR(w.hi, 0.043165728792690275, 1e-12);
  EXPECT_EQ(wilson_interval(7, 7).hi, 1);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  auto cfg = base_game(150, SetSystem::prefix(2000), SamplerConfig::reservoir(12), AdversaryKind::Attack);
  const auto one = monte_carlo(cfg, 64, 17, {1, {}});
  const auto four = monte_carlo(cfg, 64, 17, {4, {}});
  EXPECT_EQ(one.failures, four.failures);
  EXPECT_EQ(one.valid_trials, four.valid_trials);
  EXPECT_EQ(one.delta_hat, four.delta_hat);
  EXPECT_EQ(one.trials, 64u);
}

TEST(MonteCarlo, ObserverSeesEveryTrialOnceAndMatchesRunGame) {
  auto cfg = base_game(60, SetSystem::prefix(300), SamplerConfig::reservoir(8), AdversaryKind::StaticRandom);
  std::vector<std::string> seen(32);
  std::atomic<int> calls{0};
  MonteCarloOptions opt;
  opt.threads = 3;
  opt.observer = [&](std::uint64_t i, const GameTranscript& t) {
    ++calls;
    seen[i] = transcript_to_json(t).dump();
  };
  monte_carlo(cfg, 32, 21, opt);
  EXPECT_EQ(calls.load(), 32);
  cfg.trial_seed = 21;
  cfg.trial_index = 7;
  EXPECT_EQ(seen[7], transcript_to_json(run_game(cfg)).dump());
}

TEST(MonteCarlo, AbortsAreExcludedAndAllAbortedIsAnError) {
  auto cfg = base_game(300, SetSystem::prefix(64), SamplerConfig::bernoulli(Rational(1, 2)), AdversaryKind::Attack);
  cfg.adversary.on_exhaust = ExhaustionPolicy::Abort;
  EXPECT_THROW(monte_carlo(cfg, 5, 1), EstimationError);
  EXPECT_THROW(monte_carlo(cfg, 0, 1), ConfigError);

  cfg = base_game(40, SetSystem::prefix(pow2(12)), SamplerConfig::bernoulli(Rational(1, 10)), AdversaryKind::Attack);
  cfg.adversary.on_exhaust = ExhaustionPolicy::Abort;
  const auto s = monte_carlo(cfg, 200, 2);
  EXPECT_GT(s.aborts, 0u);
  EXPECT_GT(s.valid_trials, 0u);
  EXPECT_EQ(s.aborts + s.valid_trials, 200u);
  EXPECT_EQ(s.delta_hat, Rational(static_cast<std::int64_t>(s.failures), static_cast<std::int64_t>(s.valid_trials)));
}
