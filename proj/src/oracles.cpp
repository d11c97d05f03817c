#include "robust/oracles.hpp"

#include <algorithm>

#include "robust/rng.hpp"

namespace robust::oracle {
namespace {

using Coords = std::vector<std::int64_t>;

struct Box {
  Coords lo, hi;
};

std::int64_t small(const Element& x) {
  if (x < 0 || x > std::numeric_limits<std::int64_t>::max() / 4) throw DomainError("oracle: element too large");
  return x.convert_to<std::int64_t>();
}

Coords coords_of(const SetSystem& system, const Element& x) {
  if (system.kind() != SystemKind::AxisBoxes) return {small(x)};
  const std::int64_t m = system.side();
  std::int64_t rest = small(x) - 1;
  Coords c(static_cast<std::size_t>(system.dimension()));
  for (auto& v : c) {
    v = rest % m + 1;
    rest /= m;
  }
  return c;
}

Box box_of(const Range& range) {
  if (auto* r = std::get_if<PrefixRange>(&range)) return {{1}, {small(r->b)}};
  if (auto* r = std::get_if<IntervalRange>(&range)) return {{small(r->a)}, {small(r->b)}};
  if (auto* r = std::get_if<SingletonRange>(&range)) return {{small(r->a)}, {small(r->a)}};
  const auto& b = std::get<BoxRange>(range);
  return {b.lo, b.hi};
}

bool inside(const Box& box, const Coords& c) {
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] < box.lo[j] || c[j] > box.hi[j]) return false;
  return true;
}

std::vector<Coords> decode_all(const SetSystem& system, std::span<const Element> seq) {
  std::vector<Coords> out;
  out.reserve(seq.size());
  for (const auto& x : seq) out.push_back(coords_of(system, x));
  return out;
}

}  // namespace

std::vector<Range> enumerate_ranges(const SetSystem& system) {
  if (system.cardinality() > 1'000'000) throw DomainError("oracle: too many ranges to enumerate");
  std::vector<Range> out;
  if (system.kind() == SystemKind::AxisBoxes) {
    const std::int64_t m = system.side();
    const auto d = static_cast<std::size_t>(system.dimension());
    std::vector<std::pair<std::int64_t, std::int64_t>> sides;
    for (std::int64_t a = 1; a <= m; ++a)
      for (std::int64_t b = a; b <= m; ++b) sides.emplace_back(a, b);
    std::vector<std::size_t> pick(d, 0);
    while (true) {
      BoxRange r;
      for (std::size_t j = 0; j < d; ++j) {
        r.lo.push_back(sides[pick[j]].first);
        r.hi.push_back(sides[pick[j]].second);
      }
      out.emplace_back(std::move(r));
      std::size_t j = 0;
      while (j < d && ++pick[j] == sides.size()) pick[j++] = 0;
      if (j == d) break;
    }
    return out;
  }
  const std::int64_t n = small(system.universe_size());
  for (std::int64_t a = 1; a <= n; ++a) {
    switch (system.kind()) {
      case SystemKind::PrefixIntervals: out.emplace_back(PrefixRange{a}); break;
      case SystemKind::Singletons: out.emplace_back(SingletonRange{a}); break;
      default:
        for (std::int64_t b = a; b <= n; ++b) out.emplace_back(IntervalRange{a, b});
    }
  }
  return out;
}

bool member(const SetSystem& system, const Range& range, const Element& x) {
  return inside(box_of(range), coords_of(system, x));
}

Rational range_gap(const SetSystem& system, const Range& range, std::span<const Element> sample,
                   std::span<const Element> stream) {
  if (sample.empty() || stream.empty()) throw DomainError("oracle: empty sequence");
  const Box box = box_of(range);
  std::int64_t cs = 0, cx = 0;
  for (const auto& s : sample) cs += inside(box, coords_of(system, s));
  for (const auto& x : stream) cx += inside(box, coords_of(system, x));
  const Rational d = Rational(cx, static_cast<std::int64_t>(stream.size())) -
                     Rational(cs, static_cast<std::int64_t>(sample.size()));
  return d < 0 ? Rational(-d) : d;
}

BruteGap max_gap(const SetSystem& system, std::span<const Element> sample, std::span<const Element> stream) {
  if (sample.empty() || stream.empty()) throw DomainError("oracle: empty sequence");
  const auto ranges = enumerate_ranges(system);
  const auto s_pts = decode_all(system, sample);
  const auto x_pts = decode_all(system, stream);
  const auto ns = static_cast<std::int64_t>(sample.size());
  const auto nx = static_cast<std::int64_t>(stream.size());
  // |cx/nx - cs/ns| compared through the common denominator nx*ns.
  std::int64_t best = -1;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const Box box = box_of(ranges[i]);
    std::int64_t cs = 0, cx = 0;
    for (const auto& c : s_pts) cs += inside(box, c);
    for (const auto& c : x_pts) cx += inside(box, c);
    const std::int64_t num = std::abs(cx * ns - cs * nx);
    if (num > best) {
      best = num;
      best_i = i;
    }
  }
  return {Rational(best, nx * ns), ranges[best_i]};
}

std::vector<Element> replay_bernoulli(const Rational& p, std::uint64_t seed, std::span<const Element> stream) {
  const BigInt threshold = boost::multiprecision::numerator(p) * pow2(64) / boost::multiprecision::denominator(p);
  CounterRng rng(seed);
  std::vector<Element> held;
  for (const auto& x : stream)
    if (BigInt(rng.next_u64()) < threshold) held.push_back(x);
  return held;
}

std::uint64_t true_rank(const Element& target, std::span<const Element> stream) {
  std::uint64_t r = 0;
  for (const auto& x : stream) r += x <= target;
  return r;
}

bool is_beta_center(const Element& x, std::span<const Element> stream, const Rational& beta) {
  const Rational need = beta * Rational(static_cast<std::int64_t>(stream.size()));
  std::vector<Element> cuts(stream.begin(), stream.end());
  cuts.push_back(x);
  for (const auto& t : cuts) {
    if (t >= x) {  // (-inf, t] contains x
      std::int64_t c = 0;
      for (const auto& y : stream) c += y <= t;
      if (Rational(c) < need) return false;
    }
    if (t <= x) {  // [t, inf) contains x
      std::int64_t c = 0;
      for (const auto& y : stream) c += y >= t;
      if (Rational(c) < need) return false;
    }
  }
  return true;
}

bool sampled_are_smallest(std::span<const Element> stream, const std::vector<bool>& sampled) {
  for (std::size_t i = 0; i < stream.size(); ++i)
    for (std::size_t j = 0; j < stream.size(); ++j)
      if (sampled[i] && !sampled[j] && !(stream[i] < stream[j])) return false;
  return true;
}

bool is_smallest_prefix(std::span<const Element> sample, std::span<const Element> stream) {
  std::vector<Element> s(sample.begin(), sample.end()), x(stream.begin(), stream.end());
  std::sort(s.begin(), s.end());
  std::sort(x.begin(), x.end());
  if (s.size() > x.size()) return false;
  return std::equal(s.begin(), s.end(), x.begin());
}

Instance random_instance(CounterRng& rng, const SetSystem& system, std::size_t max_len) {
  Instance inst;
  const std::size_t len = 1 + rng.uniform_below(max_len);
  const BigInt& n = system.universe_size();
  std::vector<Element> pool;
  if (rng.uniform_below(2) == 0)
    for (std::uint64_t i = 0, c = 1 + rng.uniform_below(6); i < c; ++i) pool.push_back(rng.uniform_below(n) + 1);
  for (std::size_t i = 0; i < len; ++i)
    inst.stream.push_back(pool.empty() ? Element(rng.uniform_below(n) + 1) : pool[rng.uniform_below(pool.size())]);
  const std::uint64_t keep = 1 + rng.uniform_below(4);  // out of 4
  for (const auto& x : inst.stream)
    if (rng.uniform_below(4) < keep) inst.sample.push_back(x);
  if (inst.sample.empty()) inst.sample.push_back(inst.stream[rng.uniform_below(len)]);
  return inst;
}

}  // namespace robust::oracle
