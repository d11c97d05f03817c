#include "robust/selftest.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "robust/adversary.hpp"
#include "robust/advisor.hpp"
#include "robust/applications.hpp"
#include "robust/game.hpp"
#include "robust/oracles.hpp"
#include "robust/sampler.hpp"
#include "robust/set_system.hpp"

namespace robust {
namespace {

using Elements = std::vector<Element>;

Elements iota_elements(std::int64_t lo, std::int64_t hi) {
  Elements v;
  for (std::int64_t x = lo; x <= hi; ++x) v.emplace_back(x);
  return v;
}

std::string show(const Elements& v) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  out << ")";
  return out.str();
}

SetSystem random_system(CounterRng& rng, SystemKind kind, std::uint64_t max_size) {
  if (kind == SystemKind::AxisBoxes) {
    const auto m = static_cast<std::int64_t>(1 + rng.uniform_below(5));
    const auto d = static_cast<std::int64_t>(1 + rng.uniform_below(2));
    return SetSystem::boxes(m, d);
  }
  const BigInt n = 1 + rng.uniform_below(max_size);
  if (kind == SystemKind::PrefixIntervals) return SetSystem::prefix(n);
  if (kind == SystemKind::AllIntervals) return SetSystem::intervals(n);
  return SetSystem::singletons(n);
}

Rational random_eps(CounterRng& rng, const Rational& gap) {
  switch (rng.uniform_below(3)) {
    case 0: return gap;  // boundary: must pass
    case 1: return gap > 0 ? gap - Rational(1, 1000000) : Rational(1, 7);
    default: return Rational(static_cast<std::int64_t>(1 + rng.uniform_below(19)), 20);
  }
}

// One-line description of an approximation failure for diagnostics.
std::string mismatch(const SetSystem& sys, const oracle::Instance& inst, const std::string& what) {
  return std::string(to_string(sys.kind())) + " N=" + to_string(sys.universe_size()) + " stream=" +
         show(inst.stream) + " sample=" + show(inst.sample) + ": " + what;
}

void note(AuditReport& r, const std::string& what) {
  if (r.violations++ == 0) r.first_violation = what;
}

}  // namespace

AuditReport audit_verifier(std::uint64_t seed, std::uint64_t instances, std::uint64_t max_size) {
  CounterRng rng(derive_seed(seed, 0xA0D1), Stream::Aux);
  AuditReport report;
  const SystemKind kinds[] = {SystemKind::PrefixIntervals, SystemKind::AllIntervals, SystemKind::Singletons,
                              SystemKind::AxisBoxes};
  for (std::uint64_t i = 0; i < instances; ++i) {
    ++report.instances;
    const SetSystem sys = random_system(rng, kinds[i % 4], max_size);
    const auto inst = oracle::random_instance(rng, sys, max_size);
    const auto truth = oracle::max_gap(sys, inst.sample, inst.stream);
    const Rational eps = random_eps(rng, truth.gap);
    const bool expect_ok = truth.gap <= eps;

    std::vector<ApproxVerdict> verdicts{is_eps_approximation(inst.sample, inst.stream, sys, eps)};
    if (sys.kind() == SystemKind::AxisBoxes) {
      verdicts.push_back(is_eps_approximation(inst.sample, inst.stream, sys, eps, BoxStrategy::Enumerate));
      verdicts.push_back(is_eps_approximation(inst.sample, inst.stream, sys, eps, BoxStrategy::Sweep));
    }
    ++report.checked;
    for (const auto& v : verdicts) {
      if (v.ok != expect_ok || v.gap != truth.gap) {
        note(report, mismatch(sys, inst, "gap " + to_string(v.gap) + " vs brute force " + to_string(truth.gap)));
        break;
      }
      sys.check_range(v.witness);
      if (oracle::range_gap(sys, v.witness, inst.sample, inst.stream) != truth.gap) {
        note(report, mismatch(sys, inst, "witness " + describe(v.witness) + " does not attain the maximum"));
        break;
      }
    }
    if (sys.kind() != SystemKind::AxisBoxes) {
      IncrementalVerifier inc(sys);
      for (const auto& x : inst.stream) inc.add_stream(x);
      for (const auto& x : inst.sample) inc.add_sample(x);
      if (inc.max_gap().gap != truth.gap) note(report, mismatch(sys, inst, "incremental gap differs"));
    }
  }
  return report;
}

AuditReport audit_applications(std::uint64_t seed, std::uint64_t instances) {
  CounterRng rng(derive_seed(seed, 0xA0D2), Stream::Aux);
  AuditReport report;
  const Rational eps_choices[] = {Rational(1, 5), Rational(1, 4), Rational(1, 3), Rational(1, 2)};
  for (std::uint64_t i = 0; i < instances; ++i) {
    ++report.instances;
    const std::int64_t n_universe = 1 + static_cast<std::int64_t>(rng.uniform_below(30));
    const auto prefix = SetSystem::prefix(n_universe);
    const auto intervals = SetSystem::intervals(n_universe);
    const auto singletons = SetSystem::singletons(n_universe);
    const auto inst = oracle::random_instance(rng, prefix, 40);
    const auto& X = inst.stream;
    const auto& S = inst.sample;
    const auto n = static_cast<std::uint64_t>(X.size());
    const Rational nn(static_cast<std::int64_t>(n));
    const Rational eps = eps_choices[rng.uniform_below(4)];
    auto fail = [&](const std::string& what) { note(report, "stream=" + show(X) + " sample=" + show(S) + ": " + what); };

    if (is_eps_approximation(S, X, prefix, eps).ok) {
      ++report.checked;
      for (std::int64_t t = 0; t <= n_universe + 1; ++t) {
        const Rational err = estimate_rank(t, S, n) - Rational(static_cast<std::int64_t>(oracle::true_rank(t, X)));
        if ((err < 0 ? Rational(-err) : err) > eps * nn) fail("rank error at target " + std::to_string(t));
      }
      for (const Rational& q : {Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1, 10)}) {
        const Element s = estimate_quantile(q, S);
        const auto at_most = static_cast<std::int64_t>(oracle::true_rank(s, X));
        const auto below = static_cast<std::int64_t>(oracle::true_rank(s - 1, X));
        if (Rational(below) / nn > q + eps || Rational(at_most) / nn < q - eps)
          fail("quantile " + to_string(q) + " returned " + to_string(s));
      }
    }
    if (is_eps_approximation(S, X, intervals, eps).ok) {
      ++report.checked;
      for (const auto& r : oracle::enumerate_ranges(intervals)) {
        std::int64_t truth = 0;
        for (const auto& x : X) truth += oracle::member(intervals, r, x);
        const Rational err = answer_range_query(intervals, r, S, n) - Rational(truth);
        if ((err < 0 ? Rational(-err) : err) > eps * nn) fail("range count error on " + describe(r));
      }
    }
    if (is_eps_approximation(S, X, singletons, eps / 3).ok) {
      ++report.checked;
      std::map<Element, std::int64_t> freq;
      for (const auto& x : X) ++freq[x];
      for (const Rational& alpha : {Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(3, 4)}) {
        if (eps >= alpha) continue;
        const auto out = heavy_hitters(S, alpha, eps);
        for (const auto& [x, c] : freq) {
          const bool listed = std::binary_search(out.begin(), out.end(), x);
          if (Rational(c) >= alpha * nn && !listed) fail("missed heavy hitter " + to_string(x));
          if (Rational(c) <= (alpha - eps) * nn && listed) fail("reported light element " + to_string(x));
        }
      }
    }
    for (const Rational& beta : {Rational(1, 5), Rational(1, 4), Rational(2, 5)}) {
      if (!is_eps_approximation(S, X, intervals, beta / 5).ok) continue;
      ++report.checked;
      const Element c = center_point_1d(S, beta);
      if (!oracle::is_beta_center(c, X, beta)) fail("center " + to_string(c) + " for beta " + to_string(beta));
    }
  }
  return report;
}

std::vector<SelftestResult> run_selftest(std::uint64_t seed) {
  std::vector<SelftestResult> results;
  auto check = [&](std::string name, const std::function<std::string()>& body) {
    SelftestResult r{std::move(name), false, {}};
    try {
      r.detail = body();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  };

  check("bernoulli-replay", [&]() -> std::string {
    for (const auto& [p, len] : {std::pair{Rational(1, 2), 4}, std::pair{Rational(3, 10), 500}}) {
      const auto stream = iota_elements(1, len);
      Sampler sampler(SamplerConfig::bernoulli(p, 7));
      for (const auto& x : stream) sampler.step(x);
      const Elements held(sampler.sample().begin(), sampler.sample().end());
      const auto expected = oracle::replay_bernoulli(p, 7, stream);
      if (held != expected) return "p=" + to_string(p) + " held " + show(held) + ", replay " + show(expected);
    }
    return {};
  });

  check("reservoir-inclusion", [&]() -> std::string {
    const std::uint64_t trials = 100000;
    std::vector<std::uint64_t> hits(10, 0);
    for (std::uint64_t t = 0; t < trials; ++t) {
      Sampler sampler(SamplerConfig::reservoir(2), CounterRng(derive_seed(seed, t), Stream::Sampler));
      for (int x = 1; x <= 10; ++x) sampler.step(x);
      for (const auto& x : sampler.sample()) ++hits[x.convert_to<std::size_t>() - 1];
    }
    for (std::size_t i = 0; i < hits.size(); ++i) {
      const double f = static_cast<double>(hits[i]) / trials;
      if (f < 0.19 || f > 0.21) return "element " + std::to_string(i + 1) + " frequency " + std::to_string(f);
    }
    return {};
  });

  check("smallest-ten-not-approx", [&]() -> std::string {
    const auto sys = SetSystem::prefix(100);
    const auto stream = iota_elements(1, 100);
    const auto sample = iota_elements(1, 10);
    const auto v = is_eps_approximation(sample, stream, sys, Rational(1, 2));
    const auto truth = oracle::max_gap(sys, sample, stream);
    if (v.ok || v.gap != Rational(9, 10) || truth.gap != Rational(9, 10)) return "gap " + to_string(v.gap);
    if (!(v.witness == Range{PrefixRange{10}})) return "witness " + describe(v.witness);
    return {};
  });

  check("sweep-equals-enumeration", [&]() -> std::string {
    const auto r = audit_verifier(seed, 400, 50);
    return r.violations ? r.first_violation : std::string();
  });

  check("substitution-bound", [&]() -> std::string {
    if (approx_after_substitution(Rational(1, 4), 1, 4) != Rational(1, 2)) return "(1/4, 1, 4) != 1/2";
    CounterRng rng(derive_seed(seed, 0x5B), Stream::Aux);
    const auto sys = SetSystem::intervals(30);
    for (int it = 0; it < 200; ++it) {
      const std::uint64_t k = 1 + rng.uniform_below(20);
      const std::uint64_t v = rng.uniform_below(k + 1);
      Elements t, t2;
      for (std::uint64_t i = 0; i < k; ++i) t.push_back(rng.uniform_below(30) + 1);
      t2 = t;
      std::vector<std::size_t> pos(k);
      for (std::size_t i = 0; i < k; ++i) pos[i] = i;
      std::shuffle(pos.begin(), pos.end(), rng);
      for (std::uint64_t i = 0; i < v; ++i) t2[pos[i]] = rng.uniform_below(30) + 1;
      const auto gap = oracle::max_gap(sys, t2, t).gap;
      if (gap > approx_after_substitution(0, v, k)) return "gap " + to_string(gap) + " > v/k for " + show(t);
    }
    return {};
  });

  check("growth-bound", [&]() -> std::string {
    if (approx_after_growth(Rational(1, 8), Rational(1, 8)) != Rational(1, 4)) return "(1/8, 1/8) != 1/4";
    CounterRng rng(derive_seed(seed, 0x6B), Stream::Aux);
    const auto sys = SetSystem::intervals(20);
    for (int it = 0; it < 200; ++it) {
      const auto inst = oracle::random_instance(rng, sys, 20);
      Elements grown = inst.stream;
      const std::uint64_t extra = rng.uniform_below(inst.stream.size() + 1);
      for (std::uint64_t i = 0; i < extra; ++i) grown.push_back(rng.uniform_below(20) + 1);
      const Rational beta(static_cast<std::int64_t>(extra), static_cast<std::int64_t>(inst.stream.size()));
      const auto before = oracle::max_gap(sys, inst.sample, inst.stream).gap;
      const auto after = oracle::max_gap(sys, inst.sample, grown).gap;
      if (after > approx_after_growth(before, beta)) return "grown gap " + to_string(after) + " exceeds bound";
    }
    return {};
  });

  check("attack-first-point", [&]() -> std::string {
    const auto start = attack_start(100, Rational(1, 2));
    const auto first = attack_step(start, false);
    if (!first.element || *first.element != 50) return "x_1 != 50";
    const auto up = attack_step(first.state, true).state;
    const auto down = attack_step(first.state, false).state;
    if (up.a != 50 || up.b != 100) return "sampled window (" + to_string(up.a) + "," + to_string(up.b) + ")";
    if (down.a != 1 || down.b != 50) return "unsampled window (" + to_string(down.a) + "," + to_string(down.b) + ")";
    return {};
  });

  check("attack-sorted-prefix", [&]() -> std::string {
    GameConfig cfg;
    cfg.n = 50;
    cfg.eps = Rational(1, 10);
    cfg.system = SetSystem::prefix(pow2(60));
    cfg.sampler = SamplerConfig::bernoulli(Rational(1, 10));
    cfg.adversary.kind = AdversaryKind::Attack;
    cfg.trial_seed = seed;
    int valid = 0;
    for (std::uint64_t t = 0; t < 50; ++t) {
      cfg.trial_index = t;
      const auto tr = run_adaptive_game(cfg);
      if (tr.aborted) continue;
      ++valid;
      const auto stream = tr.stream();
      std::vector<bool> sampled;
      for (const auto& r : tr.rounds) sampled.push_back(r.sampled);
      if (!oracle::is_smallest_prefix(tr.final_sample, stream) || !oracle::sampled_are_smallest(stream, sampled))
        return "trial " + std::to_string(t) + " sample " + show(tr.final_sample);
    }
    return valid ? std::string() : "every trial aborted";
  });

  check("midpoint-attack", [&]() -> std::string {
    const auto first = midpoint_attack_step(MidpointState{}, false);
    if (first.element != Rational(1, 2)) return "x_1 = " + to_string(first.element);
    const auto second = midpoint_attack_step(first.state, true);
    if (second.element != Rational(3, 4)) return "x_2 = " + to_string(second.element);
    return {};
  });

  check("attack-defeats-small-bernoulli", [&]() -> std::string {
    GameConfig cfg;
    cfg.n = 200;
    cfg.eps = Rational(2, 5);
    cfg.system = SetSystem::prefix(pow2(169));
    cfg.sampler = SamplerConfig::bernoulli(round_down(boost::multiprecision::log(HighFloat(200)) / 400));
    cfg.adversary.kind = AdversaryKind::Attack;
    const auto s = monte_carlo(cfg, 60, seed, {1, {}});
    if (s.delta_hat < Rational(1, 2)) return "verdict-0 fraction " + to_string(s.delta_hat);
    return {};
  });

  check("robust-reservoir", [&]() -> std::string {
    GameConfig cfg;
    cfg.n = 5000;
    cfg.eps = Rational(1, 5);
    cfg.system = SetSystem::prefix(10000);
    cfg.sampler = SamplerConfig::reservoir(611);
    cfg.adversary.kind = AdversaryKind::Attack;
    cfg.adversary.on_exhaust = ExhaustionPolicy::Continue;
    const auto s = monte_carlo(cfg, 30, seed, {1, {}});
    if (s.delta_hat > Rational(1, 10)) return "delta_hat " + to_string(s.delta_hat);
    return {};
  });

  check("continuous-reservoir", [&]() -> std::string {
    GameConfig cfg;
    cfg.n = 2000;
    cfg.eps = Rational(1, 5);
    cfg.system = SetSystem::prefix(10000);
    cfg.sampler = SamplerConfig::reservoir(2892);
    cfg.adversary.kind = AdversaryKind::Attack;
    cfg.adversary.on_exhaust = ExhaustionPolicy::Continue;
    cfg.continuous = true;
    const auto s = monte_carlo(cfg, 20, seed, {1, {}});
    if (s.delta_hat > Rational(1, 5)) return "failure fraction " + to_string(s.delta_hat);
    return {};
  });

  check("advisor-values", [&]() -> std::string {
    const Rational tenth(1, 10), fifth(1, 5);
    const auto p = bernoulli_p_robust({tenth, tenth, 1000000, 10000, {}});
    if (p < Rational(12899219826090119, BigInt("1000000000000000000")) ||
        p > Rational(12899219826090120, BigInt("1000000000000000000")) + Rational(1, BigInt("1000000000000000")))
      return "p = " + to_string(p);
    if (bernoulli_p_robust({Rational(1, 2), Rational(1, 2), 10, 1, {}}) != 1) return "p not capped at 1";
    const Rational two_over_e = round_up(2 / boost::multiprecision::exp(HighFloat(1)));
    if (reservoir_k_robust({1, two_over_e, 1, 1, {}}) != 2) return "k(|R|=1, delta=2/e, eps=1) != 2";
    if (reservoir_k_robust({fifth, tenth, 5000, 10000, {}}) != 611) return "k != 611";
    if (reservoir_k_continuous({fifth, fifth, 2000, 10000, {}}) != 2892) return "k_continuous != 2892";
    for (const std::uint64_t n : {100000ULL, 1000000ULL, 1000000000ULL}) {
      const RobustnessSpec spec{fifth, tenth, n, 10000, {}};
      if (reservoir_k_continuous(spec) < reservoir_k_robust({fifth / 2, tenth / 2, n, 10000, {}}))
        return "continuous k below robust k at (eps/2, delta/2), n = " + std::to_string(n);
    }
    const auto single = single_range_bounds({fifth, tenth, 5000, 10000, {}});
    if (single.k != 150 || single.k != reservoir_k_robust({fifth, tenth, 5000, 1, {}})) return "single-range k";
    const auto r100 = attack_regime({fifth, tenth, 100, 1, {}}, pow2(50));
    if (r100.universe_ok || r100.window_nonempty || abs(r100.log_lower - HighFloat("127.2455546514815522534799933")) >
                                                        HighFloat("1e-20"))
      return "attack regime at n = 100";
    const auto r4 = attack_regime({fifth, tenth, 10000, 1, {}}, pow2(1000));
    if (!r4.window_nonempty || !r4.universe_ok) return "attack regime at n = 10^4";
    const auto q = application_params(Application::Quantiles, {tenth, tenth, 1000000, 1, {}}, 1000000);
    if (q.k != 3363) return "quantiles k = " + std::to_string(q.k);
    const auto b = application_params(Application::RangeQueriesBoxes, {tenth, tenth, 1000, 1, {}}, 0, 10, 2);
    if (b.cardinality != 3025) return "boxes |R| = " + to_string(b.cardinality);
    return {};
  });

  check("application-examples", [&]() -> std::string {
    if (estimate_rank(5, Elements{2, 4, 6}, 30) != 20) return "rank != 20";
    if (answer_range_query(SetSystem::intervals(9), IntervalRange{1, 4}, Elements{1, 3, 9}, 9) != 6)
      return "range count != 6";
    if (center_point_1d(iota_elements(1, 5), Rational(1, 5)) != 3) return "center != 3";
    if (heavy_hitters(Elements{5, 5, 5, 5}, Rational(1, 2), Rational(1, 4)) != Elements{5}) return "heavy hitters";
    return {};
  });

  check("application-guarantees", [&]() -> std::string {
    const auto r = audit_applications(seed, 300);
    if (r.checked == 0) return "no instance passed the approximation filter";
    return r.violations ? r.first_violation : std::string();
  });

  return results;
}

}  // namespace robust
