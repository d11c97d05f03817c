// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>

#include "robust/advisor.hpp"
#include "robust/game.hpp"
#include "robust/oracles.hpp"
#include "robust/selftest.hpp"

using namespace robust;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

GameConfig prefix_game(std::uint64_t n, BigInt N, const Rational& eps, SamplerConfig sampler, AdversaryKind adv) {
  GameConfig cfg;
  cfg.n = n;
  cfg.eps = eps;
  cfg.system = SetSystem::prefix(std::move(N));
  cfg.sampler = std::move(sampler);
  cfg.adversary.kind = adv;
  return cfg;
}

Outcome attack_lower_bound() {
  const std::uint64_t n = 200;
  // 2^ceil(6 ln^2 n), deliberately not capped at 2^(n/2).
  const HighFloat l = ln(Rational(static_cast<std::int64_t>(n)));
  const BigInt N = pow2(ceil(round_up(HighFloat(6 * l * l))).convert_to<unsigned>());
  const Rational p = round_down(HighFloat(ln(Rational(static_cast<std::int64_t>(n))) / (2 * n)));
  auto cfg = prefix_game(n, N, Rational(2, 5), SamplerConfig::bernoulli(p), AdversaryKind::Attack);
  std::mutex mu;
  std::uint64_t unsorted = 0;
  MonteCarloOptions opts;
  opts.observer = [&](std::uint64_t, const GameTranscript& t) {
    if (t.aborted) return;
    const auto stream = t.stream();
    std::vector<bool> flags;
    for (const auto& r : t.rounds) flags.push_back(r.sampled);
    if (!oracle::is_smallest_prefix(t.final_sample, stream) || !oracle::sampled_are_smallest(stream, flags)) {
      std::lock_guard lock(mu);
      ++unsorted;
    }
  };
  const auto s = monte_carlo(cfg, 200, 1001, opts);
  const double frac = to_double(s.delta_hat);
  return {unsorted == 0 && frac >= 0.5,
          "N=2^" + std::to_string(boost::multiprecision::msb(N)) + " valid=" + std::to_string(s.valid_trials) +
              " unsorted=" + std::to_string(unsorted) + " verdict0=" + fmt(frac) + " (need >= 0.5)"};
}

Outcome robust_upper_bound(const SamplerConfig& sampler, std::uint64_t seed) {
  const std::uint64_t n = 5000;
  std::string detail = sampler.kind == SamplerKind::Reservoir ? "k=" + std::to_string(sampler.k)
                                                              : "p=" + fmt(to_double(sampler.p));
  bool pass = true;
  for (const auto adv : {AdversaryKind::Attack, AdversaryKind::StaticSorted, AdversaryKind::StaticRandom}) {
    auto cfg = prefix_game(n, 10000, Rational(1, 5), sampler, adv);
    cfg.adversary.on_exhaust = ExhaustionPolicy::Continue;
    const auto s = monte_carlo(cfg, 500, seed);
    const double d = to_double(s.delta_hat);
    pass = pass && d <= 0.1 && s.wilson.hi <= 0.15;
    detail += " " + std::string(to_string(adv)) + ": delta_hat=" + fmt(d) + " hi=" + fmt(s.wilson.hi);
  }
  return {pass, detail};
}

Outcome reservoir_uniformity() {
  const int n = 50, k = 10, trials = 100000;
  std::vector<int> hits(n, 0);
  for (int t = 0; t < trials; ++t) {
    Sampler s(SamplerConfig::reservoir(k), CounterRng(derive_seed(4004, t), Stream::Sampler));
    for (int x = 1; x <= n; ++x) s.step(x);
    for (const auto& x : s.sample()) ++hits[x.convert_to<int>() - 1];
  }
  double worst = 0;
  for (int h : hits) worst = std::max(worst, std::abs(h / double(trials) - 0.2));
  return {worst <= 0.01, "max |freq - 0.2| = " + fmt(worst)};
}

// Z for R = [1, cut]: |S cap R| / p - |X cap R| (Bernoulli), (n/k) |S cap R| - |X cap R| (reservoir).
// R = [1, N/2] is the required range. Against the attack the reservoir accepts its first k
// elements, which pins every later element above N/2 and makes Z identically zero there, so a
// second cut inside the attack's window is checked as well.
Outcome martingale_means() {
  const std::uint64_t n = 1000, trials = 10000, k = 20;
  const Rational p(1, 50);
  const BigInt N = pow2(500);
  const BigInt cuts[] = {N / 2, N - N / pow2(150)};
  bool pass = true;
  std::string detail;
  for (const bool bern : {true, false}) {
    auto cfg = prefix_game(n, N, Rational(1, 10), bern ? SamplerConfig::bernoulli(p) : SamplerConfig::reservoir(k),
                           AdversaryKind::Attack);
    cfg.adversary.on_exhaust = ExhaustionPolicy::Continue;
    std::vector<double> z[2] = {std::vector<double>(trials), std::vector<double>(trials)};
    MonteCarloOptions opts;
    opts.observer = [&](std::uint64_t i, const GameTranscript& t) {
      for (int c = 0; c < 2; ++c) {
        double in_s = 0, in_x = 0;
        for (const auto& x : t.final_sample) in_s += x <= cuts[c];
        for (const auto& r : t.rounds) in_x += r.element <= cuts[c];
        z[c][i] = bern ? in_s / to_double(p) - in_x : in_s * double(n) / double(k) - in_x;
      }
    };
    monte_carlo(cfg, trials, 5005, opts);
    for (int c = 0; c < 2; ++c) {
      double m = 0, q = 0;
      for (double v : z[c]) m += v;
      m /= double(trials);
      for (double v : z[c]) q += (v - m) * (v - m);
      const double se = std::sqrt(q / double(trials - 1) / double(trials));
      pass = pass && std::abs(m) <= 3 * se;
      detail += std::string(bern ? "bernoulli" : "reservoir") + (c ? " [1,N-N/2^150]" : " [1,N/2]") +
                ": mean=" + fmt(m) + " se=" + fmt(se) + "; ";
    }
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome continuous_robustness() {
  const RobustnessSpec spec{Rational(1, 5), Rational(1, 5), 2000, 10000, std::nullopt};
  const auto k = reservoir_k_continuous(spec);
  auto cfg = prefix_game(2000, 10000, Rational(1, 5), SamplerConfig::reservoir(k), AdversaryKind::Attack);
  cfg.continuous = true;
  cfg.adversary.on_exhaust = ExhaustionPolicy::Continue;
  const auto s = monte_carlo(cfg, 300, 6006);
  const double frac = to_double(s.delta_hat);

  GameConfig single;
  single.n = 50;
  single.eps = Rational(1, 5);
  single.system = SetSystem::singletons(10000);
  single.sampler = SamplerConfig::bernoulli(Rational(1, 2));
  single.adversary.kind = AdversaryKind::StaticRandom;
  single.continuous = true;
  single.trial_seed = 6007;
  int skipped = 0, wrong = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    single.trial_index = i;
    const auto t = run_game(single);
    if (t.rounds.front().sampled) continue;
    ++skipped;
    wrong += !(t.verdict == 0 && t.failure_round == 1u);
  }
  return {frac <= 0.2 && skipped > 0 && wrong == 0,
          "k=" + std::to_string(k) + " failure fraction=" + fmt(frac) + "; singletons: " +
              std::to_string(skipped) + " unsampled first elements, " + std::to_string(wrong) + " not failing at round 1"};
}

Outcome oracle_equivalence() {
  const auto r = audit_verifier(7007, 1000, 100);
  return {r.violations == 0 && r.checked == 1000,
          std::to_string(r.checked) + " instances, " + std::to_string(r.violations) + " mismatches" +
              (r.first_violation.empty() ? "" : " (" + r.first_violation + ")")};
}

Outcome application_guarantees() {
  const auto r = audit_applications(8008, 3000);
  return {r.violations == 0 && r.checked > 0,
          std::to_string(r.checked) + " approximating instances, " + std::to_string(r.violations) + " violations" +
              (r.first_violation.empty() ? "" : " (" + r.first_violation + ")")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "robust_sampler_acceptance";
  fs::create_directories(dir);
  const std::string runs[] = {
      "mc --sampler bernoulli --p 0.05 --n 400 --N 2^120 --adversary attack --trials 50 --seed 9 --format jsonl",
      "mc --sampler reservoir --k 30 --n 400 --N 10000 --adversary static-random --trials 50 --seed 9 --format csv",
      "game --sampler reservoir --k 8 --n 300 --N 2^100 --adversary attack --on-exhaust continue --seed 9",
      "game --sampler bernoulli --p 0.3 --n 200 --N 500 --system intervals --adversary static-random --continuous "
      "--seed 9 --format jsonl"};
  int i = 0, differ = 0;
  for (const auto& args : runs) {
    std::string bytes[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / ("run" + std::to_string(i) + "_" + std::to_string(rep));
      const std::string cmd = std::string(ROBUST_SAMPLER_EXE) + " " + args + " --out " + out.string() + " 2>/dev/null";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) == 1) return {false, "command failed: " + args};
      bytes[rep] = slurp(out);
    }
    differ += bytes[0] != bytes[1] || bytes[0].empty();
    ++i;
  }
  return {differ == 0, std::to_string(i) + " invocations repeated, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 attack lower bound", attack_lower_bound},
      {"2 reservoir robustness",
       [] { return robust_upper_bound(SamplerConfig::reservoir(reservoir_k_robust(
                                          {Rational(1, 5), Rational(1, 10), 5000, 10000, std::nullopt})),
                                      2002); }},
      {"3 bernoulli robustness",
       [] { return robust_upper_bound(SamplerConfig::bernoulli(bernoulli_p_robust(
                                          {Rational(1, 5), Rational(1, 10), 5000, 10000, std::nullopt})),
                                      3003); }},
      {"4 reservoir uniformity", reservoir_uniformity},
      {"5 martingale unbiasedness", martingale_means},
      {"6 continuous robustness", continuous_robustness},
      {"7 oracle equivalence", oracle_equivalence},
      {"8 application guarantees", application_guarantees},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s criterion %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
