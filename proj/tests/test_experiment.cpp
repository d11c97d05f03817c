#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "robust/experiment.hpp"

using namespace robust;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "robust_sampler_tests";
  fs::create_directories(dir);
  return dir / name;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "robust_sampler");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

int run_exe(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(ROBUST_SAMPLER_EXE) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentSettings small_settings() {
  ExperimentSettings s;
  s.sampler = "bernoulli";
  s.p = "1/4";
  s.n = "40";
  s.N = "100";
  s.adversary = "static-random";
  s.trials = "20";
  s.seed = "3";
  return s;
}

}  // namespace

TEST(Format, DoublesRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0), "0");
  EXPECT_EQ(format_double(1), "1");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
  EXPECT_EQ(parse_output_format("jsonl"), OutputFormat::Jsonl);
  EXPECT_THROW(parse_output_format("xml"), ConfigError);
}

TEST(Summary, CsvMatchesJsonFields) {
  const auto spec = build_experiment(small_settings());
  const auto summary = monte_carlo(spec.game, spec.trials, spec.master_seed);
  const auto j = summary_to_json(spec, summary);
  const auto row = summary_csv_row(spec, summary);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  std::vector<std::string> cols;
  std::stringstream cs{std::string(kSummaryColumns)};
  for (std::string c; std::getline(cs, c, ',');) cols.push_back(c);
  ASSERT_EQ(cells.size(), cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto& v = j.at(cols[i]);
    EXPECT_EQ(cells[i], v.is_string() ? v.get<std::string>() : v.dump()) << cols[i];
  }
  EXPECT_EQ(j.at("sampler"), "bernoulli");
  EXPECT_EQ(j.at("param"), "1/4");
  EXPECT_EQ(j.at("N"), "100");
  EXPECT_EQ(j.at("trials"), 20);
}

TEST(Summary, ZeroFailuresPrintAsZero) {
  auto s = small_settings();
  s.sampler = "reservoir";
  s.k = "40";
  s.p.reset();
  const auto spec = build_experiment(s);
  const auto summary = monte_carlo(spec.game, spec.trials, spec.master_seed);
  const auto j = summary_to_json(spec, summary);
  EXPECT_EQ(j.at("delta_hat"), "0");
  EXPECT_EQ(j.at("ci_lo"), "0");
}

TEST(Emit, CsvAndJsonlFiles) {
  const auto spec = build_experiment(small_settings());
  const auto summary = monte_carlo(spec.game, spec.trials, spec.master_seed);
  const auto csv = scratch("summary.csv");
  emit_results(spec, summary, OutputFormat::Csv, csv.string());
  const auto text = slurp(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), kSummaryColumns);

  const std::vector<nlohmann::json> lines{{{"trial", 0}}, {{"trial", 1}}};
  const auto jl = scratch("summary.jsonl");
  emit_results(spec, summary, OutputFormat::Jsonl, jl.string(), lines);
  std::ifstream in(jl);
  std::vector<nlohmann::json> parsed;
  for (std::string l; std::getline(in, l);) parsed.push_back(nlohmann::json::parse(l));
  ASSERT_EQ(parsed.size(), 3u);
  EXPECT_EQ(parsed[1].at("trial"), 1);
  EXPECT_EQ(parsed[2].at("failures"), summary.failures);

  EXPECT_THROW(emit_results(spec, summary, OutputFormat::Json, "/nonexistent-dir/x.json"), IoError);
}

TEST(Emit, TranscriptLinesMatchRounds) {
  const auto spec = build_experiment(small_settings());
  const auto t = run_game(spec.game);
  const auto path = scratch("transcript.jsonl");
  emit_transcript(spec.game, t, OutputFormat::Jsonl, path.string());
  std::ifstream in(path);
  std::size_t count = 0;
  for (std::string l; std::getline(in, l);) {
    const auto j = nlohmann::json::parse(l);
    ++count;
    EXPECT_EQ(j.at("round"), count);
  }
  EXPECT_EQ(count, t.rounds.size());

  const auto json_path = scratch("transcript.json");
  emit_transcript(spec.game, t, OutputFormat::Json, json_path.string());
  const auto j = nlohmann::json::parse(slurp(json_path));
  EXPECT_EQ(j.at("rounds").size(), 40u);
  EXPECT_EQ(j.at("config").at("sampler"), "bernoulli");
}

TEST(Settings, FlagsOverrideConfig) {
  const auto base = settings_from_json(nlohmann::json::parse(
      R"({"sampler": "reservoir", "k": 7, "n": 50, "system": {"kind": "intervals", "N": 30}, "continuous": true})"));
  EXPECT_EQ(base.k, "7");
  EXPECT_EQ(base.system, "intervals");
  EXPECT_EQ(base.N, "30");
  EXPECT_EQ(base.continuous, true);
  ExperimentSettings flags;
  flags.k = "9";
  const auto merged = overlay(base, flags);
  EXPECT_EQ(merged.k, "9");
  EXPECT_EQ(merged.n, "50");
  const auto spec = build_experiment(merged);
  EXPECT_EQ(spec.game.sampler.k, 9u);
  EXPECT_TRUE(spec.game.continuous);
  EXPECT_EQ(spec.game.system, SetSystem::intervals(30));

  EXPECT_THROW(settings_from_json(nlohmann::json::parse(R"({"colour": "red"})")), ConfigError);
  EXPECT_THROW(settings_from_json(nlohmann::json::parse(R"({"continuous": "yes"})")), ConfigError);
  EXPECT_THROW(settings_from_json(nlohmann::json::parse(R"([1, 2])")), ConfigError);
}

TEST(Settings, Defaults) {
  const auto spec = build_experiment({});
  EXPECT_EQ(spec.game.n, 1000u);
  EXPECT_EQ(spec.game.eps, Rational(1, 10));
  EXPECT_EQ(spec.delta, Rational(1, 10));
  EXPECT_EQ(spec.game.sampler.kind, SamplerKind::Reservoir);
  EXPECT_EQ(spec.game.adversary.kind, AdversaryKind::Attack);
  EXPECT_EQ(spec.game.system.universe_size(), default_attack_universe(1000));
  EXPECT_EQ(spec.trials, 1u);
  EXPECT_EQ(spec.master_seed, 0u);

  ExperimentSettings s;
  s.adversary = "static-sorted";
  s.n = "25";
  EXPECT_EQ(build_experiment(s).game.system.universe_size(), 25);
  s.adversary = "midpoint-attack";
  EXPECT_EQ(build_experiment(s).game.system.universe_size(), pow2(25));
}

TEST(Settings, ErrorsNameTheField) {
  auto expect_field = [](ExperimentSettings s, const std::string& field) {
    try {
      build_experiment(s);
      ADD_FAILURE() << "no error for " << field;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  ExperimentSettings s;
  s.n = "0";
  expect_field(s, "--n");
  s = {};
  s.eps = "abc";
  expect_field(s, "--eps");
  s = {};
  s.sampler = "bogus";
  expect_field(s, "--sampler");
  s = {};
  s.system = "boxes";
  expect_field(s, "--m");
  s = {};
  s.trials = "0";
  expect_field(s, "--trials");
  s = {};
  s.schedule = "sometimes";
  expect_field(s, "--schedule");
}

TEST(Cli, AdviseExample) {
  testing::internal::CaptureStdout();
  const int rc = run_cli({"advise", "--eps", "0.2", "--delta", "0.1", "--card", "10000"});
  const auto out = testing::internal::GetCapturedStdout();
  ASSERT_EQ(rc, 0);
  EXPECT_EQ(nlohmann::json::parse(out).at("k"), 611);
}

TEST(Cli, UsageErrorsExitOne) {
  testing::internal::CaptureStderr();
  EXPECT_EQ(run_cli({"mc", "--sampler", "bogus"}), 1);
  EXPECT_EQ(run_cli({"game", "--n", "0"}), 1);
  EXPECT_EQ(run_cli({"no-such-command"}), 1);
  testing::internal::GetCapturedStderr();
}

TEST(Cli, FullReservoirGameWins) {
  const auto out = scratch("full.json");
  ASSERT_EQ(run_exe("game --sampler reservoir --k 100 --n 50 --adversary static-random --N 1000", out), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(out)).at("verdict"), 1);
}

TEST(Cli, RerunsAreByteIdentical) {
  const std::string mc =
      "mc --sampler bernoulli --p 0.1 --n 300 --N 2^80 --adversary attack --on-exhaust continue --trials 40 "
      "--seed 12 --format jsonl";
  const auto a = scratch("mc_a.jsonl"), b = scratch("mc_b.jsonl");
  ASSERT_EQ(run_exe(mc, a), 0);
  ASSERT_EQ(run_exe(mc + " --threads 1", b), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());

  const std::string game = "game --sampler reservoir --k 5 --n 100 --N 2^60 --seed 4 --format jsonl";
  const auto c = scratch("g_a.jsonl"), d = scratch("g_b.jsonl");
  const int rc = run_exe(game, c);
  EXPECT_EQ(run_exe(game, d), rc);
  EXPECT_EQ(slurp(c), slurp(d));
}
