#include "robust/game.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace robust {
namespace {

// Witness when the sample is empty: a range carrying stream mass, with the
// sample's density taken as 0.
GapReport empty_sample_report(const SetSystem& system, std::span<const Element> stream) {
  const auto [lo, hi] = std::minmax_element(stream.begin(), stream.end());
  switch (system.kind()) {
    case SystemKind::PrefixIntervals: return {1, PrefixRange{*hi}};
    case SystemKind::AllIntervals: return {1, IntervalRange{*lo, *hi}};
    case SystemKind::Singletons: {
      SingletonRange r{stream.front()};
      return {density(system, r, stream), r};
    }
    case SystemKind::AxisBoxes: {
      BoxRange box;
      box.lo.assign(static_cast<std::size_t>(system.dimension()), system.side());
      box.hi.assign(box.lo.size(), 1);
      for (const auto& x : stream) {
        const auto c = system.decode_point(x);
        for (std::size_t a = 0; a < c.size(); ++a) {
          box.lo[a] = std::min(box.lo[a], c[a]);
          box.hi[a] = std::max(box.hi[a], c[a]);
        }
      }
      return {1, std::move(box)};
    }
  }
  throw std::logic_error("unknown system");
}

std::uint64_t sampler_start_round(const SamplerConfig& s) {
  return s.kind == SamplerKind::Reservoir ? s.k : 1;
}

GameTranscript play(const GameConfig& cfg, bool continuous) {
  cfg.validate();
  const Seed128 seed = derive_seed(cfg.trial_seed, cfg.trial_index);
  Sampler sampler(cfg.sampler, CounterRng(seed, Stream::Sampler));
  const GameParams params{cfg.n, cfg.system.universe_size(), cfg.eps};
  auto adversary = make_adversary(cfg.adversary, cfg.sampler, params, CounterRng(seed, Stream::Adversary));

  const bool one_dimensional = cfg.system.kind() != SystemKind::AxisBoxes;
  std::optional<IncrementalVerifier> verifier;
  if (continuous && one_dimensional) verifier.emplace(cfg.system);

  std::vector<std::uint64_t> schedule;
  if (continuous && cfg.schedule == CheckSchedule::Checkpoints)
    schedule = checkpoint_rounds(sampler_start_round(cfg.sampler), cfg.n, cfg.eps / 4);
  auto next_check = schedule.begin();

  GameTranscript t;
  t.rounds.reserve(static_cast<std::size_t>(cfg.n));
  std::vector<Element> stream;
  stream.reserve(static_cast<std::size_t>(cfg.n));

  for (std::uint64_t i = 1; i <= cfg.n; ++i) {
    const AdversaryContext ctx{stream, sampler.state(), i, params};
    auto x = adversary->next(ctx);
    if (!x) {
      t.aborted = true;
      t.abort_round = i;
      break;
    }
    if (!cfg.system.in_universe(*x))
      throw ConfigError("adversary '" + std::string(adversary->name()) + "' submitted " + x->str() +
                        " outside [1, N]");
    stream.push_back(*x);
    const StepOutcome outcome = sampler.step(stream.back());
    t.rounds.push_back({stream.back(), outcome.accepted,
                        cfg.record_digests ? sample_digest(sampler.sample()) : 0});

    if (!continuous) continue;
    if (verifier) {
      verifier->add_stream(stream.back());
      if (outcome.accepted) verifier->add_sample(stream.back());
      if (outcome.evicted) verifier->remove_sample(*outcome.evicted);
    }
    if (cfg.schedule == CheckSchedule::Checkpoints) {
      if (next_check == schedule.end() || *next_check != i) continue;
      ++next_check;
    }
    const auto sample = sampler.sample();
    GapReport report;
    if (sample.empty()) {
      report = empty_sample_report(cfg.system, stream);
    } else if (sample.size() == stream.size()) {
      // A subsequence of equal length is the stream itself.
      continue;
    } else {
      report = verifier ? verifier->max_gap() : max_density_gap(sample, stream, cfg.system);
    }
    if (sample.empty() || report.gap > cfg.eps) {
      t.verdict = 0;
      t.failure_round = i;
      t.gap = std::move(report.gap);
      t.witness = std::move(report.witness);
      break;
    }
  }

  t.final_sample.assign(sampler.sample().begin(), sampler.sample().end());
  t.ever_sampled = sampler.state().ever_sampled;
  if (t.aborted || t.verdict) return t;

  if (t.final_sample.empty()) {
    auto report = empty_sample_report(cfg.system, stream);
    t.verdict = 0;
    t.gap = std::move(report.gap);
    t.witness = std::move(report.witness);
    if (continuous) t.failure_round = cfg.n;
    return t;
  }
  auto verdict = is_eps_approximation(t.final_sample, stream, cfg.system, cfg.eps);
  t.gap = std::move(verdict.gap);
  t.witness = std::move(verdict.witness);
  t.verdict = verdict.ok ? 1 : 0;
  // Reached only when every scheduled check passed; the last round is always checked.
  if (continuous && !verdict.ok) t.failure_round = cfg.n;
  return t;
}

}  // namespace

void GameConfig::validate() const {
  if (n == 0) throw ConfigError("n: stream length must be at least 1");
  if (eps <= 0 || eps >= 1) throw ConfigError("eps: must lie strictly between 0 and 1, got " + to_string(eps));
  sampler.validate();
}

std::vector<Element> GameTranscript::stream() const {
  std::vector<Element> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.element);
  return out;
}

std::uint64_t sample_digest(std::span<const Element> sample) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  for (const auto& x : sample) {
    const auto& backend = x.backend();
    mix(backend.size());
    for (std::size_t j = 0; j < backend.size(); ++j) mix(static_cast<std::uint64_t>(backend.limbs()[j]));
  }
  return h;
}

GameTranscript run_adaptive_game(const GameConfig& cfg) { return play(cfg, false); }

GameTranscript run_continuous_game(const GameConfig& cfg) { return play(cfg, true); }

GameTranscript run_game(const GameConfig& cfg) { return play(cfg, cfg.continuous); }

std::vector<std::uint64_t> checkpoint_rounds(std::uint64_t k, std::uint64_t n, const Rational& beta) {
  std::vector<std::uint64_t> rounds;
  if (n == 0) return rounds;
  std::uint64_t i = std::clamp<std::uint64_t>(k, 1, n);
  rounds.push_back(i);
  const Rational growth = Rational(1) + beta;
  while (i < n) {
    const BigInt bound = floor(growth * Rational(BigInt(i)));
    std::uint64_t next = bound >= n ? n : bound.convert_to<std::uint64_t>();
    if (next <= i) next = i + 1;
    rounds.push_back(i = next);
  }
  return rounds;
}

WilsonInterval wilson_interval(std::uint64_t failures, std::uint64_t trials) {
  if (trials == 0) return {0, 1};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(failures) / n;
  const double denom = 1 + z * z / n;
  const double center = (phat + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom;
  // The exact interval touches 0 (resp. 1) when there are no failures (successes).
  return {failures == 0 ? 0.0 : std::max(0.0, center - half), failures == trials ? 1.0 : std::min(1.0, center + half)};
}

MonteCarloSummary monte_carlo(GameConfig cfg, std::uint64_t trials, std::uint64_t master_seed,
                              const MonteCarloOptions& options) {
  if (trials == 0) throw ConfigError("trials: must be at least 1");
  cfg.validate();
  cfg.trial_seed = master_seed;

  enum : std::uint8_t { Pass, Fail, Abort };
  std::vector<std::uint8_t> status(static_cast<std::size_t>(trials), Abort);
  std::atomic<std::uint64_t> next{0};
  std::mutex observer_lock;
  std::exception_ptr error;
  std::mutex error_lock;

  auto worker = [&] {
    try {
      for (std::uint64_t i; (i = next.fetch_add(1)) < trials;) {
        GameConfig trial = cfg;
        trial.trial_index = i;
        const GameTranscript t = run_game(trial);
        status[static_cast<std::size_t>(i)] = t.aborted ? Abort : (*t.verdict == 1 ? Pass : Fail);
        if (options.observer) {
          std::lock_guard lock(observer_lock);
          options.observer(i, t);
        }
      }
    } catch (...) {
      std::lock_guard lock(error_lock);
      if (!error) error = std::current_exception();
      next = trials;
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  MonteCarloSummary s;
  s.trials = trials;
  for (auto st : status) {
    if (st == Abort) ++s.aborts;
    else ++s.valid_trials, s.failures += (st == Fail);
  }
  if (s.valid_trials == 0) throw EstimationError("all " + std::to_string(trials) + " trials were aborted");
  s.delta_hat = Rational(s.failures, s.valid_trials);
  s.wilson = wilson_interval(s.failures, s.valid_trials);
  return s;
}

}  // namespace robust
