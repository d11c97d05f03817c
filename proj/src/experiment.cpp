#include "robust/experiment.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "robust/advisor.hpp"
#include "robust/serialization.hpp"

namespace robust {
namespace {

template <class F>
auto parse_field(std::string_view field, const std::string& text, F&& parse) -> decltype(parse(text)) {
  try {
    return parse(text);
  } catch (const std::exception& e) {
    throw ConfigError("--" + std::string(field) + ": invalid value '" + text + "' (" + e.what() + ")");
  }
}

std::uint64_t parse_u64(const std::string& text) {
  const BigInt v = parse_bigint(text);
  if (v < 0 || v > std::numeric_limits<std::uint64_t>::max()) throw ConfigError("out of 64-bit range");
  return v.convert_to<std::uint64_t>();
}

std::string param_column(const GameConfig& g) {
  return g.sampler.kind == SamplerKind::Bernoulli ? to_string(g.sampler.p) : std::to_string(g.sampler.k);
}

// Writes through a temporary buffer so a failed open never leaves partial output.
void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Jsonl: return "jsonl";
  }
  return "?";
}

OutputFormat parse_output_format(std::string_view name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "jsonl") return OutputFormat::Jsonl;
  throw ConfigError("expected json|csv|jsonl, got '" + std::string(name) + "'");
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

nlohmann::json summary_to_json(const ExperimentSpec& spec, const MonteCarloSummary& s) {
  const auto& g = spec.game;
  nlohmann::json j;
  j["sampler"] = std::string(to_string(g.sampler.kind));
  j["param"] = param_column(g);
  j["n"] = g.n;
  j["N"] = to_string(g.system.universe_size());
  j["eps"] = to_string(g.eps);
  j["delta"] = spec.delta ? to_string(*spec.delta) : std::string();
  j["adversary"] = std::string(to_string(g.adversary.kind));
  j["trials"] = s.trials;
  j["valid"] = s.valid_trials;
  j["failures"] = s.failures;
  j["delta_hat"] = to_string(s.delta_hat);
  j["ci_lo"] = format_double(s.wilson.lo);
  j["ci_hi"] = format_double(s.wilson.hi);
  j["aborts"] = s.aborts;
  j["seed"] = std::to_string(spec.master_seed);
  return j;
}

std::string summary_csv_row(const ExperimentSpec& spec, const MonteCarloSummary& s) {
  const auto j = summary_to_json(spec, s);
  std::ostringstream row;
  std::string_view columns = kSummaryColumns;
  bool first = true;
  while (!columns.empty()) {
    const auto comma = columns.find(',');
    const std::string key(columns.substr(0, comma));
    columns = comma == std::string_view::npos ? std::string_view{} : columns.substr(comma + 1);
    const auto& v = j.at(key);
    row << (first ? "" : ",") << (v.is_string() ? v.get<std::string>() : v.dump());
    first = false;
  }
  return row.str();
}

void emit_results(const ExperimentSpec& spec, const MonteCarloSummary& summary, OutputFormat format,
                  const std::string& path, std::span<const nlohmann::json> trial_lines) {
  switch (format) {
    case OutputFormat::Csv:
      write_text(path, std::string(kSummaryColumns) + "\n" + summary_csv_row(spec, summary) + "\n");
      break;
    case OutputFormat::Json:
      write_text(path, summary_to_json(spec, summary).dump(2) + "\n");
      break;
    case OutputFormat::Jsonl: {
      std::string text;
      for (const auto& line : trial_lines) text += line.dump() + "\n";
      write_text(path, text + summary_to_json(spec, summary).dump() + "\n");
      break;
    }
  }
}

void emit_transcript(const GameConfig& cfg, const GameTranscript& t, OutputFormat format, const std::string& path) {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::Jsonl:
      for (std::size_t i = 0; i < t.rounds.size(); ++i) out << round_to_json(i + 1, t.rounds[i]).dump() << "\n";
      break;
    case OutputFormat::Json: {
      auto j = transcript_to_json(t);
      j["config"] = {{"n", cfg.n},
                     {"eps", to_string(cfg.eps)},
                     {"system", system_to_json(cfg.system)},
                     {"sampler", std::string(to_string(cfg.sampler.kind))},
                     {"param", param_column(cfg)},
                     {"adversary", std::string(to_string(cfg.adversary.kind))},
                     {"continuous", cfg.continuous},
                     {"seed", std::to_string(cfg.trial_seed)}};
      out << j.dump(2) << "\n";
      break;
    }
    case OutputFormat::Csv:
      out << "round,element,sampled\n";
      for (std::size_t i = 0; i < t.rounds.size(); ++i)
        out << i + 1 << "," << t.rounds[i].element << "," << (t.rounds[i].sampled ? 1 : 0) << "\n";
      break;
  }
  write_text(path, out.str());
}

ExperimentSettings settings_from_json(const nlohmann::json& config) {
  if (!config.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentSettings s;
  auto text = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  for (const auto& [key, value] : config.items()) {
    if (key == "continuous") {
      if (!value.is_boolean()) throw ConfigError("config key 'continuous': expected true or false");
      s.continuous = value.get<bool>();
      continue;
    }
    if (key == "system" && value.is_object()) {
      s.system = value.at("kind").get<std::string>();
      if (value.contains("N")) s.N = text(value.at("N"));
      if (value.contains("m")) s.m = text(value.at("m"));
      if (value.contains("d")) s.d = text(value.at("d"));
      continue;
    }
    std::optional<std::string>* slot = nullptr;
    if (key == "sampler") slot = &s.sampler;
    else if (key == "p") slot = &s.p;
    else if (key == "k") slot = &s.k;
    else if (key == "n") slot = &s.n;
    else if (key == "N") slot = &s.N;
    else if (key == "eps") slot = &s.eps;
    else if (key == "delta") slot = &s.delta;
    else if (key == "system") slot = &s.system;
    else if (key == "m") slot = &s.m;
    else if (key == "d") slot = &s.d;
    else if (key == "adversary") slot = &s.adversary;
    else if (key == "constant") slot = &s.constant;
    else if (key == "on_exhaust") slot = &s.on_exhaust;
    else if (key == "schedule") slot = &s.schedule;
    else if (key == "trials") slot = &s.trials;
    else if (key == "seed") slot = &s.seed;
    else if (key == "out") slot = &s.out;
    else if (key == "format") slot = &s.format;
    else if (key == "threads") slot = &s.threads;
    else throw ConfigError("config: unknown key '" + key + "'");
    if (value.is_object() || value.is_array() || value.is_null())
      throw ConfigError("config key '" + key + "': expected a scalar");
    *slot = text(value);
  }
  return s;
}

ExperimentSettings overlay(ExperimentSettings base, const ExperimentSettings& flags) {
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(base.sampler, flags.sampler);
  take(base.p, flags.p);
  take(base.k, flags.k);
  take(base.n, flags.n);
  take(base.N, flags.N);
  take(base.eps, flags.eps);
  take(base.delta, flags.delta);
  take(base.system, flags.system);
  take(base.m, flags.m);
  take(base.d, flags.d);
  take(base.adversary, flags.adversary);
  take(base.constant, flags.constant);
  take(base.on_exhaust, flags.on_exhaust);
  take(base.schedule, flags.schedule);
  take(base.trials, flags.trials);
  take(base.seed, flags.seed);
  take(base.out, flags.out);
  take(base.format, flags.format);
  take(base.threads, flags.threads);
  take(base.continuous, flags.continuous);
  return base;
}

ExperimentSpec build_experiment(const ExperimentSettings& s) {
  ExperimentSpec spec;
  GameConfig& g = spec.game;

  g.n = s.n ? parse_field("n", *s.n, parse_u64) : 1000;
  if (g.n == 0) throw ConfigError("--n: stream length must be at least 1");
  g.eps = s.eps ? parse_field("eps", *s.eps, parse_rational) : Rational(1, 10);
  if (g.eps <= 0 || g.eps >= 1) throw ConfigError("--eps: must lie strictly between 0 and 1");
  spec.delta = s.delta ? parse_field("delta", *s.delta, parse_rational) : Rational(1, 10);
  if (*spec.delta <= 0 || *spec.delta >= 1) throw ConfigError("--delta: must lie strictly between 0 and 1");
  g.continuous = s.continuous.value_or(false);
  if (s.schedule) {
    if (*s.schedule == "every") g.schedule = CheckSchedule::EveryRound;
    else if (*s.schedule == "checkpoints") g.schedule = CheckSchedule::Checkpoints;
    else throw ConfigError("--schedule: expected 'every' or 'checkpoints', got '" + *s.schedule + "'");
  }

  g.adversary.kind = s.adversary ? parse_field("adversary", *s.adversary, [](const std::string& t) {
    return parse_adversary_kind(t);
  }) : AdversaryKind::Attack;
  if (s.on_exhaust)
    g.adversary.on_exhaust = parse_field("on-exhaust", *s.on_exhaust, [](const std::string& t) {
      return parse_exhaustion_policy(t);
    });
  if (s.constant) g.adversary.constant = parse_field("constant", *s.constant, parse_bigint);

  const SystemKind kind = s.system ? parse_field("system", *s.system, [](const std::string& t) {
    return parse_system_kind(t);
  }) : SystemKind::PrefixIntervals;
  if (kind == SystemKind::AxisBoxes) {
    if (!s.m || !s.d) throw ConfigError("--system boxes: --m and --d are required");
    const auto m = parse_field("m", *s.m, parse_u64);
    const auto d = parse_field("d", *s.d, parse_u64);
    g.system = parse_field("m", *s.m, [&](const std::string&) {
      return SetSystem::boxes(static_cast<std::int64_t>(m), static_cast<std::int64_t>(d));
    });
    if (s.N && parse_field("N", *s.N, parse_bigint) != g.system.universe_size())
      throw ConfigError("--N: boxes fix N = m^d");
  } else {
    BigInt universe;
    if (s.N) universe = parse_field("N", *s.N, parse_bigint);
    else if (g.adversary.kind == AdversaryKind::Attack) universe = default_attack_universe(g.n);
    else if (g.adversary.kind == AdversaryKind::MidpointAttack) universe = pow2(static_cast<unsigned>(g.n));
    else universe = g.n;
    if (universe < 1) throw ConfigError("--N: universe size must be at least 1");
    g.system = kind == SystemKind::PrefixIntervals ? SetSystem::prefix(universe)
               : kind == SystemKind::AllIntervals  ? SetSystem::intervals(universe)
                                                   : SetSystem::singletons(universe);
  }

  g.sampler.kind = s.sampler ? parse_field("sampler", *s.sampler, [](const std::string& t) {
    return parse_sampler_kind(t);
  }) : SamplerKind::Reservoir;
  const RobustnessSpec sizing{g.eps, *spec.delta, g.n, g.system.cardinality(), std::nullopt};
  if (g.sampler.kind == SamplerKind::Bernoulli) {
    g.sampler.p = s.p ? parse_field("p", *s.p, parse_rational) : bernoulli_p_robust(sizing);
    if (g.sampler.p < 0 || g.sampler.p > 1) throw ConfigError("--p: must lie in [0,1]");
  } else {
    g.sampler.k = s.k ? parse_field("k", *s.k, parse_u64)
                      : (g.continuous ? reservoir_k_continuous(sizing) : reservoir_k_robust(sizing));
    if (g.sampler.k == 0) throw ConfigError("--k: reservoir capacity must be at least 1");
  }

  spec.trials = s.trials ? parse_field("trials", *s.trials, parse_u64) : 1;
  if (spec.trials == 0) throw ConfigError("--trials: must be at least 1");
  spec.master_seed = s.seed ? parse_field("seed", *s.seed, parse_u64) : 0;
  g.trial_seed = spec.master_seed;
  spec.output_path = s.out.value_or("");
  if (s.format) spec.format = parse_field("format", *s.format, [](const std::string& t) {
    return parse_output_format(t);
  });
  spec.threads = s.threads ? static_cast<unsigned>(parse_field("threads", *s.threads, parse_u64)) : 0;

  // Adversary-specific constraints surface here rather than mid-run.
  parse_field("adversary", std::string(to_string(g.adversary.kind)), [&](const std::string&) {
    const GameParams params{g.n, g.system.universe_size(), g.eps};
    return make_adversary(g.adversary, g.sampler, params, CounterRng(Seed128{})) != nullptr;
  });
  return spec;
}

}  // namespace robust
