#pragma once

// Queries answered from an epsilon-approximating sample. Each guarantee holds
// whenever the sample passes is_eps_approximation for the system named below.

#include <cstdint>
#include <span>
#include <vector>

#include "robust/numeric.hpp"
#include "robust/set_system.hpp"

namespace robust {

/// n * |{s in sample : s <= target}| / |sample|. Error <= eps*n against the
/// true rank when the sample eps-approximates the stream w.r.t. prefixes.
Rational estimate_rank(const Element& target, std::span<const Element> sample, std::uint64_t n);

/// The ceil(q*|sample|)-th smallest sample element (1-based, at least the first);
/// q in (0,1). For even sizes q = 1/2 gives the lower median.
Element estimate_quantile(const Rational& q, std::span<const Element> sample);

/// Distinct x with d_{x}(sample) >= alpha - eps/3, ascending. Requires
/// 0 < eps < alpha; intended for samples that (eps/3)-approximate the stream
/// w.r.t. singletons.
std::vector<Element> heavy_hitters(std::span<const Element> sample, const Rational& alpha, const Rational& eps);

/// |R cap sample| * n / |sample|.
Rational answer_range_query(const SetSystem& system, const Range& range, std::span<const Element> sample,
                            std::uint64_t n);

/// A (6 beta/5)-center of the sample (its lower median), which is a
/// beta-center of the stream when the sample (beta/5)-approximates it w.r.t.
/// all intervals. Requires beta in (0, 1/2]; throws DomainError when the sample
/// admits no (6 beta/5)-center, i.e. the rank window
/// [ceil(6 beta |S|/5), |S| - ceil(6 beta |S|/5) + 1] is empty.
Element center_point_1d(std::span<const Element> sample, const Rational& beta);

}  // namespace robust
