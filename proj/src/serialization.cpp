#include "robust/serialization.hpp"

#include <cstdio>

namespace robust {
namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

json state_to_json(const SamplerConfig& config, const SampleState& state) {
  json j;
  j["kind"] = std::string(to_string(config.kind));
  if (config.kind == SamplerKind::Bernoulli) j["p"] = to_string(config.p);
  else j["k"] = std::to_string(config.k);
  j["round"] = state.round;
  j["ever_sampled"] = state.ever_sampled;
  j["held"] = elements_to_json(state.held);
  return j;
}

json system_to_json(const SetSystem& system) {
  json j;
  j["kind"] = std::string(to_string(system.kind()));
  j["N"] = to_string(system.universe_size());
  if (system.kind() == SystemKind::AxisBoxes) {
    j["m"] = system.side();
    j["d"] = system.dimension();
  }
  return j;
}

SetSystem system_from_json(const json& j) {
  const auto kind = parse_system_kind(j.at("kind").get<std::string>());
  if (kind == SystemKind::AxisBoxes) return SetSystem::boxes(j.at("m").get<std::int64_t>(), j.at("d").get<std::int64_t>());
  const Element n = element_from_json(j.at("N"));
  switch (kind) {
    case SystemKind::PrefixIntervals: return SetSystem::prefix(n);
    case SystemKind::AllIntervals: return SetSystem::intervals(n);
    default: return SetSystem::singletons(n);
  }
}

json range_to_json(const Range& range) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PrefixRange>) {
          return {{"kind", "prefix"}, {"b", to_string(r.b)}};
        } else if constexpr (std::is_same_v<T, IntervalRange>) {
          return {{"kind", "interval"}, {"a", to_string(r.a)}, {"b", to_string(r.b)}};
        } else if constexpr (std::is_same_v<T, SingletonRange>) {
          return {{"kind", "singleton"}, {"a", to_string(r.a)}};
        } else {
          return {{"kind", "box"}, {"lo", r.lo}, {"hi", r.hi}};
        }
      },
      range);
}

Range range_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "prefix") return PrefixRange{element_from_json(j.at("b"))};
  if (kind == "interval") return IntervalRange{element_from_json(j.at("a")), element_from_json(j.at("b"))};
  if (kind == "singleton") return SingletonRange{element_from_json(j.at("a"))};
  if (kind == "box")
    return BoxRange{j.at("lo").get<std::vector<std::int64_t>>(), j.at("hi").get<std::vector<std::int64_t>>()};
  throw ConfigError("range kind: expected prefix|interval|singleton|box, got '" + kind + "'");
}

json elements_to_json(std::span<const Element> elements) {
  json arr = json::array();
  for (const auto& x : elements) arr.push_back(to_string(x));
  return arr;
}

Element element_from_json(const json& j) {
  if (j.is_string()) return parse_bigint(j.get<std::string>());
  if (j.is_number_unsigned()) return Element(j.get<std::uint64_t>());
  if (j.is_number_integer()) return Element(j.get<std::int64_t>());
  throw ConfigError("expected an integer or a decimal string, got " + j.dump());
}

std::vector<Element> elements_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of elements");
  std::vector<Element> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(element_from_json(x));
  return out;
}

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  // Decimal literals go through their shortest text form, so 0.2 means 1/5.
  if (j.is_number_float()) return parse_rational(j.dump());
  throw ConfigError("expected a number, got " + j.dump());
}

json round_to_json(std::uint64_t round, const RoundRecord& record) {
  return {{"round", round},
          {"element", to_string(record.element)},
          {"sampled", record.sampled},
          {"digest", hex64(record.sample_digest)}};
}

json verdict_to_json(const GameTranscript& t) {
  json j;
  j["valid"] = t.valid();
  j["verdict"] = t.verdict ? json(*t.verdict) : json(nullptr);
  j["rounds_played"] = t.rounds.size();
  j["aborted"] = t.aborted;
  j["abort_round"] = t.abort_round ? json(*t.abort_round) : json(nullptr);
  j["failure_round"] = t.failure_round ? json(*t.failure_round) : json(nullptr);
  j["gap"] = t.gap ? json(to_string(*t.gap)) : json(nullptr);
  j["witness"] = t.witness ? range_to_json(*t.witness) : json(nullptr);
  j["sample_size"] = t.final_sample.size();
  j["ever_sampled"] = t.ever_sampled;
  return j;
}

json transcript_to_json(const GameTranscript& t) {
  json j = verdict_to_json(t);
  json rounds = json::array();
  for (std::size_t i = 0; i < t.rounds.size(); ++i) rounds.push_back(round_to_json(i + 1, t.rounds[i]));
  j["rounds"] = std::move(rounds);
  j["final_sample"] = elements_to_json(t.final_sample);
  return j;
}

}  // namespace robust
