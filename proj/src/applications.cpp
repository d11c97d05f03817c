#include "robust/applications.hpp"

#include <algorithm>

namespace robust {
namespace {

void require_sample(std::span<const Element> sample) {
  if (sample.empty()) throw DomainError("query on an empty sample");
}

std::vector<Element> sorted_copy(std::span<const Element> sample) {
  std::vector<Element> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  return v;
}

std::size_t rank_index(const Rational& q, std::size_t size) {
  const BigInt idx = ceil(q * Rational(BigInt(size)));
  const auto i = idx < 1 ? std::size_t{1} : static_cast<std::size_t>(idx.convert_to<std::uint64_t>());
  return std::min(i, size);
}

}  // namespace

Rational estimate_rank(const Element& target, std::span<const Element> sample, std::uint64_t n) {
  require_sample(sample);
  const auto below = std::count_if(sample.begin(), sample.end(), [&](const Element& s) { return s <= target; });
  return Rational(BigInt(n) * below, BigInt(sample.size()));
}

Element estimate_quantile(const Rational& q, std::span<const Element> sample) {
  require_sample(sample);
  if (q <= 0 || q >= 1) throw DomainError("quantile must lie strictly between 0 and 1");
  auto v = sorted_copy(sample);
  return v[rank_index(q, v.size()) - 1];
}

std::vector<Element> heavy_hitters(std::span<const Element> sample, const Rational& alpha, const Rational& eps) {
  require_sample(sample);
  if (eps <= 0 || eps >= alpha) throw DomainError("heavy hitters need 0 < eps < alpha");
  const Rational cut = alpha - eps / 3;
  const auto v = sorted_copy(sample);
  std::vector<Element> out;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    if (Rational(BigInt(j - i), BigInt(v.size())) >= cut) out.push_back(v[i]);
    i = j;
  }
  return out;
}

Rational answer_range_query(const SetSystem& system, const Range& range, std::span<const Element> sample,
                            std::uint64_t n) {
  require_sample(sample);
  system.check_range(range);
  const auto hits = std::count_if(sample.begin(), sample.end(),
                                  [&](const Element& s) { return system.contains(range, s); });
  return Rational(BigInt(hits) * n, BigInt(sample.size()));
}

Element center_point_1d(std::span<const Element> sample, const Rational& beta) {
  require_sample(sample);
  if (beta <= 0 || beta > Rational(1, 2)) throw DomainError("beta must lie in (0, 1/2]");
  const auto size = sample.size();
  const BigInt depth = ceil(Rational(6, 5) * beta * Rational(BigInt(size)));
  // Sample ranks r with r >= depth and size - r + 1 >= depth.
  if (BigInt(size) + 1 < 2 * depth)
    throw DomainError("the sample has no (6*beta/5)-center for beta = " + to_string(beta));
  auto v = sorted_copy(sample);
  return v[rank_index(Rational(1, 2), size) - 1];
}

}  // namespace robust
