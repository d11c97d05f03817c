#pragma once

// Brute-force reference implementations used to cross-check the library.
//
// Nothing here calls the code under test for the quantity it checks: ranges
// are enumerated explicitly, membership is decided by a separate predicate,
// and densities are plain counts. Everything is sized for small universes.

#include <cstdint>
#include <span>
#include <vector>

#include "robust/numeric.hpp"
#include "robust/rng.hpp"
#include "robust/set_system.hpp"

namespace robust::oracle {

/// Every range of `system`. Throws DomainError when there are more than 10^6.
std::vector<Range> enumerate_ranges(const SetSystem& system);

/// Membership decided from the range bounds and base-m digits alone.
bool member(const SetSystem& system, const Range& range, const Element& x);

/// |d_R(stream) - d_R(sample)| by direct counting.
Rational range_gap(const SetSystem& system, const Range& range, std::span<const Element> sample,
                   std::span<const Element> stream);

struct BruteGap {
  Rational gap;
  Range witness;  // first maximiser in enumeration order
};

/// Maximum gap over the enumerated family.
BruteGap max_gap(const SetSystem& system, std::span<const Element> sample, std::span<const Element> stream);

/// The sample a Bernoulli(p) sampler must hold after `stream`, replaying one
/// 64-bit draw per element from a generator keyed like Sampler's default
/// (CounterRng(seed)). Acceptance: draw < floor(p * 2^64), by integer division.
std::vector<Element> replay_bernoulli(const Rational& p, std::uint64_t seed, std::span<const Element> stream);

/// |{x in stream : x <= target}|.
std::uint64_t true_rank(const Element& target, std::span<const Element> stream);

/// Every closed half-line through a stream value or `x` that contains x holds
/// at least beta*|stream| stream elements.
bool is_beta_center(const Element& x, std::span<const Element> stream, const Rational& beta);

/// Every sampled element is below every unsampled one.
bool sampled_are_smallest(std::span<const Element> stream, const std::vector<bool>& sampled);

/// True when the multiset `sample` equals the |sample| smallest stream elements.
bool is_smallest_prefix(std::span<const Element> sample, std::span<const Element> stream);

struct Instance {
  std::vector<Element> stream;
  std::vector<Element> sample;  // a non-empty subsequence of stream
};

/// Random stream of length 1..max_len over the system's universe, sometimes
/// drawn from a small pool so values repeat, and a random subsequence of it.
Instance random_instance(CounterRng& rng, const SetSystem& system, std::size_t max_len);

}  // namespace robust::oracle
