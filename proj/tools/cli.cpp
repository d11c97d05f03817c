#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "robust/advisor.hpp"
#include "robust/applications.hpp"
#include "robust/experiment.hpp"
#include "robust/game.hpp"
#include "robust/oracles.hpp"
#include "robust/selftest.hpp"
#include "robust/serialization.hpp"

using namespace robust;

namespace {

constexpr std::pair<const char*, const char*> kExperimentFlags[] = {
    {"sampler", "bernoulli|reservoir"},
    {"p", "Bernoulli inclusion probability (e.g. 0.02 or 1/50)"},
    {"k", "reservoir capacity"},
    {"n", "stream length"},
    {"N", "universe size (e.g. 10000 or 2^169)"},
    {"eps", "approximation tolerance"},
    {"delta", "target failure probability (sizes unset p/k)"},
    {"system", "prefix|intervals|singletons|boxes"},
    {"m", "box side length"},
    {"d", "box dimension"},
    {"adversary", "attack|midpoint-attack|static-sorted|static-random|constant"},
    {"constant", "element submitted by the constant adversary"},
    {"on-exhaust", "attack behaviour once its window collapses: abort|continue"},
    {"schedule", "continuous-game checks: every|checkpoints"},
    {"trials", "number of games for mc"},
    {"seed", "master seed (fallback: ROBUST_SAMPLER_SEED)"},
    {"out", "output file (default: stdout)"},
    {"format", "json|csv|jsonl"},
    {"threads", "mc worker threads (0: all cores)"},
};

struct ExperimentFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool continuous = false;
  CLI::Option* continuous_opt = nullptr;
  std::string config;

  std::optional<std::string> get(const std::string& name) const {
    if (options.at(name)->count() == 0) return std::nullopt;
    return values.at(name);
  }
};

void add_experiment_flags(CLI::App& sub, ExperimentFlags& f) {
  for (const auto& [name, help] : kExperimentFlags)
    f.options[name] = sub.add_option(std::string("--") + name, f.values[name], help);
  f.continuous_opt = sub.add_flag("--continuous", f.continuous, "play the continuous game");
  sub.add_option("--config", f.config, "JSON config file; flags override its values");
}

ExperimentSettings load_settings(const ExperimentFlags& f) {
  ExperimentSettings base;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("--config: cannot read '" + f.config + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("--config: " + std::string(e.what()));
    }
    base = settings_from_json(j);
  }
  ExperimentSettings flags;
  flags.sampler = f.get("sampler");
  flags.p = f.get("p");
  flags.k = f.get("k");
  flags.n = f.get("n");
  flags.N = f.get("N");
  flags.eps = f.get("eps");
  flags.delta = f.get("delta");
  flags.system = f.get("system");
  flags.m = f.get("m");
  flags.d = f.get("d");
  flags.adversary = f.get("adversary");
  flags.constant = f.get("constant");
  flags.on_exhaust = f.get("on-exhaust");
  flags.schedule = f.get("schedule");
  flags.trials = f.get("trials");
  flags.seed = f.get("seed");
  flags.out = f.get("out");
  flags.format = f.get("format");
  flags.threads = f.get("threads");
  if (f.continuous_opt->count()) flags.continuous = f.continuous;
  auto s = overlay(std::move(base), flags);
  if (!s.seed)
    if (const char* env = std::getenv("ROBUST_SAMPLER_SEED")) s.seed = std::string(env);
  return s;
}

int cmd_game(const ExperimentFlags& f) {
  const auto spec = build_experiment(load_settings(f));
  GameConfig cfg = spec.game;
  cfg.record_digests = true;
  const auto t = run_game(cfg);
  emit_transcript(cfg, t, spec.format, spec.output_path);
  if (t.aborted) {
    std::cerr << "attack aborted at round " << *t.abort_round << "; the game has no verdict\n";
    return 2;
  }
  return 0;
}

int cmd_mc(const ExperimentFlags& f) {
  const auto spec = build_experiment(load_settings(f));
  std::vector<nlohmann::json> lines;
  MonteCarloOptions options;
  options.threads = spec.threads;
  if (spec.format == OutputFormat::Jsonl) {
    lines.resize(spec.trials);
    options.observer = [&lines](std::uint64_t i, const GameTranscript& t) {
      auto j = verdict_to_json(t);
      j["trial"] = i;
      lines[i] = std::move(j);
    };
  }
  const auto summary = monte_carlo(spec.game, spec.trials, spec.master_seed, options);
  emit_results(spec, summary, spec.format, spec.output_path, lines);
  return 0;
}

int cmd_attack_demo(const ExperimentFlags& f) {
  auto settings = load_settings(f);
  if (settings.adversary && *settings.adversary != "attack")
    throw ConfigError("--adversary: attack-demo always plays the attack");
  settings.adversary = "attack";
  const bool default_sampler = !settings.sampler && !settings.p && !settings.k;
  if (default_sampler) settings.sampler = "bernoulli";
  auto spec = build_experiment(settings);
  auto& cfg = spec.game;
  if (default_sampler) {  // p = ln n / (2n), inside the attack regime
    const HighFloat n(cfg.n);
    cfg.sampler = SamplerConfig::bernoulli(round_down(boost::multiprecision::log(n) / (2 * n)));
    if (cfg.sampler.p <= 0) cfg.sampler.p = Rational(1, 2);
  }
  cfg.record_digests = false;
  const auto t = run_game(cfg);
  const auto stream = t.stream();
  std::vector<bool> sampled;
  for (const auto& r : t.rounds) sampled.push_back(r.sampled);

  nlohmann::json j;
  j["sampler"] = std::string(to_string(cfg.sampler.kind));
  j["param"] = cfg.sampler.kind == SamplerKind::Bernoulli ? to_string(cfg.sampler.p) : std::to_string(cfg.sampler.k);
  j["n"] = cfg.n;
  j["N"] = to_string(cfg.system.universe_size());
  j["p_prime"] = to_string(attack_split(attack_sampling_rate(cfg.sampler, cfg.n), cfg.n));
  j["game"] = verdict_to_json(t);
  j["sampled_below_unsampled"] = oracle::sampled_are_smallest(stream, sampled);
  j["sample_is_smallest_prefix"] = oracle::is_smallest_prefix(t.final_sample, stream);
  std::ofstream file;
  if (!spec.output_path.empty() && spec.output_path != "-") {
    file.open(spec.output_path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + spec.output_path + "' for writing");
  }
  (file.is_open() ? static_cast<std::ostream&>(file) : std::cout) << j.dump(2) << "\n";
  return t.aborted ? 2 : 0;
}

struct AdviseFlags {
  std::string eps = "0.1", delta = "0.1", card, n = "1000", N, system, m, d, c_cont = "8", c_attack = "1/12", app, vc;
};

std::string high_str(const HighFloat& v) { return v.str(20); }

int cmd_advise(const AdviseFlags& a, const std::map<std::string, CLI::Option*>& given) {
  RobustnessSpec spec;
  spec.eps = parse_rational(a.eps);
  spec.delta = parse_rational(a.delta);
  spec.n = parse_bigint(a.n).convert_to<std::uint64_t>();
  if (given.at("vc")->count()) spec.vc_dimension = parse_bigint(a.vc).convert_to<std::uint64_t>();
  std::optional<SetSystem> system;
  if (given.at("system")->count()) {
    const auto kind = parse_system_kind(a.system);
    if (kind == SystemKind::AxisBoxes) {
      if (a.m.empty() || a.d.empty()) throw ConfigError("--system boxes: --m and --d are required");
      system = SetSystem::boxes(std::stoll(a.m), std::stoll(a.d));
    } else {
      if (a.N.empty()) throw ConfigError("--system: --N is required");
      const BigInt n = parse_bigint(a.N);
      system = kind == SystemKind::PrefixIntervals ? SetSystem::prefix(n)
               : kind == SystemKind::AllIntervals  ? SetSystem::intervals(n)
                                                   : SetSystem::singletons(n);
    }
  }
  if (given.at("card")->count()) spec.system_cardinality = parse_bigint(a.card);
  else if (system) spec.system_cardinality = system->cardinality();
  else if (!a.N.empty()) spec.system_cardinality = parse_bigint(a.N);
  else throw ConfigError("--card: give --card, --N or --system");
  spec.validate();
  const Rational c_cont = parse_rational(a.c_cont);
  const Rational c_attack = parse_rational(a.c_attack);

  nlohmann::json j;
  j["eps"] = to_string(spec.eps);
  j["delta"] = to_string(spec.delta);
  j["n"] = spec.n;
  j["card"] = to_string(spec.system_cardinality);
  if (spec.vc_dimension) j["vc_dimension"] = *spec.vc_dimension;
  const Rational p = bernoulli_p_robust(spec);
  j["p"] = to_string(p);
  j["p_float"] = to_double(p);
  j["k"] = reservoir_k_robust(spec);
  j["k_continuous"] = reservoir_k_continuous(spec, c_cont);
  j["c_continuous"] = to_string(c_cont);
  const auto single = single_range_bounds(spec);
  j["single_range"] = {{"p", to_string(single.p)}, {"p_float", to_double(single.p)}, {"k", single.k}};
  if (spec.n >= 2) {
    const BigInt universe = a.N.empty() ? spec.system_cardinality : parse_bigint(a.N);
    const auto r = attack_regime(spec, universe, c_attack);
    j["attack_thresholds"] = {{"N", to_string(universe)},
                              {"c", to_string(c_attack)},
                              {"bernoulli_p", to_string(r.bernoulli_p_threshold)},
                              {"bernoulli_p_float", to_double(r.bernoulli_p_threshold)},
                              {"reservoir_k", to_string(r.reservoir_k_threshold)},
                              {"reservoir_k_float", to_double(r.reservoir_k_threshold)},
                              {"ln_N_min", high_str(r.log_lower)},
                              {"ln_N_max", high_str(r.log_upper)},
                              {"window_nonempty", r.window_nonempty}};
    j["universe_ok"] = r.universe_ok;
  } else {
    j["attack_thresholds"] = nullptr;
    j["universe_ok"] = false;
  }
  if (!a.app.empty()) {
    Application app;
    if (a.app == "quantiles") app = Application::Quantiles;
    else if (a.app == "heavy-hitters") app = Application::HeavyHitters;
    else if (a.app == "boxes") app = Application::RangeQueriesBoxes;
    else throw ConfigError("--app: expected quantiles|heavy-hitters|boxes, got '" + a.app + "'");
    const BigInt universe = a.N.empty() ? spec.system_cardinality : parse_bigint(a.N);
    const auto ap = application_params(app, spec, universe, a.m.empty() ? 0 : std::stoll(a.m),
                                       a.d.empty() ? 0 : std::stoll(a.d));
    j["application"] = {{"name", a.app},        {"p", to_string(ap.p)}, {"p_float", to_double(ap.p)},
                        {"k", ap.k},            {"eps_used", to_string(ap.eps_used)},
                        {"card", to_string(ap.cardinality)}};
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct AppFlags {
  std::string sample_path, target, q, alpha, eps, range, beta, N, m, d;
};

int cmd_app(const std::string& query, const AppFlags& a) {
  std::ifstream in(a.sample_path);
  if (!in) throw ConfigError("--sample: cannot read '" + a.sample_path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--sample: " + std::string(e.what()));
  }
  const auto sample = elements_from_json(doc.is_array() ? doc : doc.at("sample"));
  const std::uint64_t n =
      doc.is_object() && doc.contains("n") ? doc.at("n").get<std::uint64_t>() : static_cast<std::uint64_t>(sample.size());
  auto need = [](const std::string& v, const char* flag) {
    if (v.empty()) throw ConfigError(std::string("--") + flag + " is required");
    return v;
  };

  nlohmann::json j;
  j["query"] = query;
  if (query == "rank") {
    const Rational r = estimate_rank(parse_bigint(need(a.target, "target")), sample, n);
    j["result"] = to_string(r);
    j["result_float"] = to_double(r);
  } else if (query == "quantile") {
    j["result"] = to_string(estimate_quantile(parse_rational(need(a.q, "q")), sample));
  } else if (query == "heavy-hitters") {
    j["result"] = elements_to_json(
        heavy_hitters(sample, parse_rational(need(a.alpha, "alpha")), parse_rational(need(a.eps, "eps"))));
  } else if (query == "range-count") {
    const Range range = range_from_json(nlohmann::json::parse(need(a.range, "range")));
    std::optional<SetSystem> system;
    if (std::holds_alternative<BoxRange>(range)) {
      system = SetSystem::boxes(std::stoll(need(a.m, "m")), std::stoll(need(a.d, "d")));
    } else {
      BigInt universe = a.N.empty() ? BigInt(1) : parse_bigint(a.N);
      if (a.N.empty()) {
        for (const auto& x : sample) universe = std::max(universe, x);
        std::visit([&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, PrefixRange> || std::is_same_v<T, IntervalRange>) universe = std::max(universe, r.b);
          else if constexpr (std::is_same_v<T, SingletonRange>) universe = std::max(universe, r.a);
        }, range);
      }
      system = std::holds_alternative<PrefixRange>(range)     ? SetSystem::prefix(universe)
               : std::holds_alternative<IntervalRange>(range) ? SetSystem::intervals(universe)
                                                              : SetSystem::singletons(universe);
    }
    const Rational r = answer_range_query(*system, range, sample, n);
    j["result"] = to_string(r);
    j["result_float"] = to_double(r);
  } else {
    j["result"] = to_string(center_point_1d(sample, parse_rational(need(a.beta, "beta"))));
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_selftest(std::uint64_t seed) {
  bool all = true;
  for (const auto& r : run_selftest(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) std::cout << ": " << r.detail;
    std::cout << "\n";
    all = all && r.passed;
  }
  std::cout << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all ? 0 : 2;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Adaptive sampling games, Monte Carlo robustness estimates and parameter advice"};
  app.require_subcommand(1);

  ExperimentFlags game_flags, mc_flags, demo_flags;
  auto* game = app.add_subcommand("game", "play one game and write its transcript");
  add_experiment_flags(*game, game_flags);
  auto* mc = app.add_subcommand("mc", "estimate the failure probability over many seeded games");
  add_experiment_flags(*mc, mc_flags);
  auto* demo = app.add_subcommand("attack-demo", "run the binary-search attack and check the sorted-prefix property");
  add_experiment_flags(*demo, demo_flags);

  AdviseFlags advise_flags;
  std::map<std::string, CLI::Option*> advise_given;
  auto* advise = app.add_subcommand("advise", "sample sizes and attack thresholds");
  advise->add_option("--eps", advise_flags.eps, "tolerance")->capture_default_str();
  advise->add_option("--delta", advise_flags.delta, "failure probability")->capture_default_str();
  advise_given["card"] = advise->add_option("--card", advise_flags.card, "number of ranges |R|");
  advise->add_option("--n", advise_flags.n, "stream length")->capture_default_str();
  advise->add_option("--N", advise_flags.N, "universe size (attack regime; defaults to |R|)");
  advise_given["system"] = advise->add_option("--system", advise_flags.system, "derive |R| from a system");
  advise->add_option("--m", advise_flags.m, "box side");
  advise->add_option("--d", advise_flags.d, "box dimension");
  advise->add_option("--c-continuous", advise_flags.c_cont, "constant of the continuous bound")->capture_default_str();
  advise->add_option("--c-attack", advise_flags.c_attack, "constant of the attack thresholds")->capture_default_str();
  advise->add_option("--app", advise_flags.app, "quantiles|heavy-hitters|boxes");
  advise_given["vc"] = advise->add_option("--vc", advise_flags.vc, "VC dimension (reported only)");

  AppFlags app_flags;
  auto* app_cmd = app.add_subcommand("app", "answer a query from a sample file");
  app_cmd->require_subcommand(1);
  std::string app_query;
  for (const char* name : {"rank", "quantile", "heavy-hitters", "range-count", "center"}) {
    auto* q = app_cmd->add_subcommand(name);
    q->add_option("--sample", app_flags.sample_path, "JSON file {\"sample\": [...], \"n\": ...}")->required();
    q->add_option("--target", app_flags.target);
    q->add_option("--q", app_flags.q);
    q->add_option("--alpha", app_flags.alpha);
    q->add_option("--eps", app_flags.eps);
    q->add_option("--range", app_flags.range, "range as JSON, e.g. {\"kind\":\"interval\",\"a\":1,\"b\":4}");
    q->add_option("--beta", app_flags.beta);
    q->add_option("--N", app_flags.N);
    q->add_option("--m", app_flags.m);
    q->add_option("--d", app_flags.d);
    q->callback([&app_query, name] { app_query = name; });
  }

  std::uint64_t selftest_seed = 1;
  auto* selftest = app.add_subcommand("selftest", "check the library against brute-force references");
  selftest->add_option("--seed", selftest_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*game) return cmd_game(game_flags);
    if (*mc) return cmd_mc(mc_flags);
    if (*demo) return cmd_attack_demo(demo_flags);
    if (*advise) return cmd_advise(advise_flags, advise_given);
    if (*app_cmd) return cmd_app(app_query, app_flags);
    if (*selftest) return cmd_selftest(selftest_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EstimationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
