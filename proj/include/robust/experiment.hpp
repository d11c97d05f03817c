#pragma once

// Experiment descriptions and result emission for the command-line driver.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "robust/game.hpp"

namespace robust {

enum class OutputFormat { Json, Csv, Jsonl };

std::string_view to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view name);

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
  GameConfig game;
  std::optional<Rational> delta;  // reported, and used to size unset p / k
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  std::string output_path;        // empty: stdout
  OutputFormat format = OutputFormat::Json;
  unsigned threads = 0;
};

/// Column order of the summary CSV.
inline constexpr std::string_view kSummaryColumns =
    "sampler,param,n,N,eps,delta,adversary,trials,valid,failures,delta_hat,ci_lo,ci_hi,aborts,seed";

/// Same fields as the CSV columns; numbers that may exceed 64 bits are strings.
nlohmann::json summary_to_json(const ExperimentSpec& spec, const MonteCarloSummary& summary);
std::string summary_csv_row(const ExperimentSpec& spec, const MonteCarloSummary& summary);

/// Writes `summary` as JSON (one object) or CSV (header + row). Jsonl writes
/// `trial_lines` (one per trial, in trial order) followed by the summary
/// object, one per line. Throws IoError when `path` cannot be written; an
/// empty path means stdout.
void emit_results(const ExperimentSpec& spec, const MonteCarloSummary& summary, OutputFormat format,
                  const std::string& path, std::span<const nlohmann::json> trial_lines = {});

/// Writes a game transcript: Json is one object with rounds, Jsonl one round per line.
void emit_transcript(const GameConfig& cfg, const GameTranscript& t, OutputFormat format, const std::string& path);

/// Unparsed experiment settings. A JSON config file fills these first and
/// command-line flags then override individual fields.
struct ExperimentSettings {
  std::optional<std::string> sampler, p, k, n, N, eps, delta, system, m, d, adversary, constant, on_exhaust,
      schedule, trials, seed, out, format, threads;
  std::optional<bool> continuous;
};

/// Keys mirror the flag names (sampler, p, k, n, N, eps, delta, system, m, d,
/// adversary, constant, on_exhaust, continuous, schedule, trials, seed, out,
/// format, threads). Unknown keys are a ConfigError.
ExperimentSettings settings_from_json(const nlohmann::json& config);

/// Copies every field set in `flags` over `base`.
ExperimentSettings overlay(ExperimentSettings base, const ExperimentSettings& flags);

/// Parses and validates settings, filling defaults:
///   sampler reservoir, n 1000, eps 0.1, delta 0.1, system prefix, adversary attack,
///   N = 2^ceil(6 (ln n)^2) capped at 2^(n/2) for the attack, 2^n for the
///   midpoint attack, n otherwise;
///   k (resp. p) from the robust-size formula when not given (the continuous
///   formula with c = 8 for --continuous).
/// Throws ConfigError naming the offending field.
ExperimentSpec build_experiment(const ExperimentSettings& settings);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace robust
