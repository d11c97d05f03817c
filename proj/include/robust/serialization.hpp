#pragma once

// JSON forms of the library's values. Big integers and rationals are always
// written as decimal strings ("12", "3/8") so no precision is lost.

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "robust/game.hpp"
#include "robust/sampler.hpp"
#include "robust/set_system.hpp"

namespace robust {

using nlohmann::json;

/// {"kind", "p" | "k", "round", "ever_sampled", "held": ["..."]}
json state_to_json(const SamplerConfig& config, const SampleState& state);

/// {"kind": "prefix", "N": "..."}; boxes add "m" and "d".
json system_to_json(const SetSystem& system);
SetSystem system_from_json(const json& j);

json range_to_json(const Range& range);
Range range_from_json(const json& j);

json elements_to_json(std::span<const Element> elements);
/// Accepts strings ("2^64" allowed) and non-negative JSON integers.
std::vector<Element> elements_from_json(const json& j);
Element element_from_json(const json& j);
Rational rational_from_json(const json& j);

/// One transcript line: {"round", "element", "sampled", "digest"}.
json round_to_json(std::uint64_t round, const RoundRecord& record);

/// Verdict fields only (no rounds).
json verdict_to_json(const GameTranscript& t);

/// Verdict fields plus "rounds" and "final_sample".
json transcript_to_json(const GameTranscript& t);

}  // namespace robust
