#include "robust/set_system.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace robust {
namespace {

using Wide = __int128;

Wide wide_abs(Wide v) { return v < 0 ? -v : v; }

BigInt to_big(Wide v) {
  const bool negative = v < 0;
  unsigned __int128 u = negative ? static_cast<unsigned __int128>(-(v + 1)) + 1
                                 : static_cast<unsigned __int128>(v);
  BigInt out = static_cast<std::uint64_t>(u >> 64);
  out <<= 64;
  out |= static_cast<std::uint64_t>(u);
  return negative ? BigInt(-out) : out;
}

Rational make_gap(Wide numerator, std::uint64_t sample_size, std::uint64_t stream_size) {
  return Rational(to_big(wide_abs(numerator)), BigInt(sample_size) * BigInt(stream_size));
}

// Entries are sorted by value and distinct. Weight of an entry is
// in_sample * |X| - in_stream * |S|.
template <class Entry>
GapReport sweep_1d(const std::vector<Entry>& entries, SystemKind kind, std::uint64_t stream_size,
                   std::uint64_t sample_size) {
  const Wide nx = stream_size;
  const Wide ns = sample_size;
  auto weight = [&](const Entry& e) { return Wide(e.in_sample) * nx - Wide(e.in_stream) * ns; };

  switch (kind) {
    case SystemKind::Singletons: {
      Wide best = 0;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < entries.size(); ++j) {
        const Wide w = wide_abs(weight(entries[j]));
        if (w > best) best = w, arg = j;
      }
      Element at = entries.empty() ? Element(1) : entries[arg].value;
      return {make_gap(best, sample_size, stream_size), SingletonRange{at}};
    }
    case SystemKind::PrefixIntervals: {
      Wide prefix = 0, best = 0;
      std::optional<std::size_t> arg;
      for (std::size_t j = 0; j < entries.size(); ++j) {
        prefix += weight(entries[j]);
        if (wide_abs(prefix) > best) best = wide_abs(prefix), arg = j;
      }
      return {make_gap(best, sample_size, stream_size),
              PrefixRange{arg ? entries[*arg].value : Element(1)}};
    }
    case SystemKind::AllIntervals: {
      // f(-1) = 0 is the empty prefix; interval (lo, hi] has weight f(hi) - f(lo).
      Wide prefix = 0, hi_val = 0, lo_val = 0;
      std::ptrdiff_t hi_pos = -1, lo_pos = -1;
      for (std::size_t j = 0; j < entries.size(); ++j) {
        prefix += weight(entries[j]);
        if (prefix > hi_val) hi_val = prefix, hi_pos = static_cast<std::ptrdiff_t>(j);
        if (prefix < lo_val) lo_val = prefix, lo_pos = static_cast<std::ptrdiff_t>(j);
      }
      if (hi_val == lo_val) return {make_gap(0, sample_size, stream_size), IntervalRange{1, 1}};
      const auto first = std::min(hi_pos, lo_pos);
      const auto last = std::max(hi_pos, lo_pos);
      Element a = first < 0 ? Element(1) : Element(entries[static_cast<std::size_t>(first)].value + 1);
      return {make_gap(hi_val - lo_val, sample_size, stream_size),
              IntervalRange{std::move(a), entries[static_cast<std::size_t>(last)].value}};
    }
    case SystemKind::AxisBoxes:
      break;
  }
  throw std::logic_error("sweep_1d: boxes are not one-dimensional");
}

struct BatchEntry {
  Element value;
  std::int64_t in_stream = 0;
  std::int64_t in_sample = 0;
};

std::vector<BatchEntry> count_values(std::span<const Element> sample, std::span<const Element> stream) {
  std::vector<std::pair<const Element*, bool>> all;
  all.reserve(sample.size() + stream.size());
  for (const auto& x : stream) all.emplace_back(&x, false);
  for (const auto& x : sample) all.emplace_back(&x, true);
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return *l.first < *r.first; });
  std::vector<BatchEntry> entries;
  for (const auto& [ptr, in_sample] : all) {
    if (entries.empty() || entries.back().value != *ptr) entries.push_back({*ptr, 0, 0});
    (in_sample ? entries.back().in_sample : entries.back().in_stream) += 1;
  }
  return entries;
}

// ---- boxes ----------------------------------------------------------------

struct BoxExtreme {
  Wide max_sum = 0, min_sum = 0;
  std::vector<std::size_t> max_lo, max_hi, min_lo, min_hi;
};

// Max and min box sums over a dense tensor with shape `dims` (row-major, last
// axis fastest). Boxes are non-empty index boxes; empty boxes contribute 0 via
// the zero initialisation.
BoxExtreme extreme_boxes(const std::vector<Wide>& tensor, std::span<const std::size_t> dims) {
  BoxExtreme out;
  const std::size_t d = dims.size();
  out.max_lo.assign(d, 0), out.max_hi.assign(d, 0), out.min_lo.assign(d, 0), out.min_hi.assign(d, 0);
  if (d == 1) {
    // Kadane for both signs.
    Wide run_max = 0, run_min = 0;
    std::size_t start_max = 0, start_min = 0;
    for (std::size_t j = 0; j < dims[0]; ++j) {
      if (run_max <= 0) run_max = tensor[j], start_max = j;
      else run_max += tensor[j];
      if (run_min >= 0) run_min = tensor[j], start_min = j;
      else run_min += tensor[j];
      if (run_max > out.max_sum) out.max_sum = run_max, out.max_lo[0] = start_max, out.max_hi[0] = j;
      if (run_min < out.min_sum) out.min_sum = run_min, out.min_lo[0] = start_min, out.min_hi[0] = j;
    }
    return out;
  }
  const std::size_t slab = tensor.size() / dims[0];
  const auto rest = dims.subspan(1);
  std::vector<Wide> acc(slab);
  for (std::size_t lo = 0; lo < dims[0]; ++lo) {
    std::fill(acc.begin(), acc.end(), Wide(0));
    for (std::size_t hi = lo; hi < dims[0]; ++hi) {
      for (std::size_t t = 0; t < slab; ++t) acc[t] += tensor[hi * slab + t];
      BoxExtreme sub = extreme_boxes(acc, rest);
      if (sub.max_sum > out.max_sum) {
        out.max_sum = sub.max_sum;
        out.max_lo[0] = lo, out.max_hi[0] = hi;
        std::copy(sub.max_lo.begin(), sub.max_lo.end(), out.max_lo.begin() + 1);
        std::copy(sub.max_hi.begin(), sub.max_hi.end(), out.max_hi.begin() + 1);
      }
      if (sub.min_sum < out.min_sum) {
        out.min_sum = sub.min_sum;
        out.min_lo[0] = lo, out.min_hi[0] = hi;
        std::copy(sub.min_lo.begin(), sub.min_lo.end(), out.min_lo.begin() + 1);
        std::copy(sub.min_hi.begin(), sub.min_hi.end(), out.min_hi.begin() + 1);
      }
    }
  }
  return out;
}

struct BoxPoint {
  std::vector<std::int64_t> coords;
  Wide weight;
};

std::vector<BoxPoint> box_points(const SetSystem& system, std::span<const Element> sample,
                                 std::span<const Element> stream) {
  const Wide nx = stream.size();
  const Wide ns = sample.size();
  std::vector<BoxPoint> points;
  for (const auto& e : count_values(sample, stream))
    points.push_back({system.decode_point(e.value), Wide(e.in_sample) * nx - Wide(e.in_stream) * ns});
  return points;
}

GapReport boxes_from_extreme(const BoxExtreme& ext, const std::vector<std::vector<std::int64_t>>& axis_values,
                             std::size_t d, std::uint64_t ns, std::uint64_t nx) {
  const bool use_max = ext.max_sum >= -ext.min_sum;
  const Wide best = use_max ? ext.max_sum : -ext.min_sum;
  BoxRange box;
  if (best == 0) {
    box.lo.assign(d, 1), box.hi.assign(d, 1);
  } else {
    const auto& lo = use_max ? ext.max_lo : ext.min_lo;
    const auto& hi = use_max ? ext.max_hi : ext.min_hi;
    for (std::size_t a = 0; a < d; ++a) {
      box.lo.push_back(axis_values[a][lo[a]]);
      box.hi.push_back(axis_values[a][hi[a]]);
    }
  }
  return {make_gap(best, ns, nx), std::move(box)};
}

// Coordinate-compressed sweep: only coordinates that occur matter.
GapReport boxes_sweep(const SetSystem& system, std::span<const Element> sample, std::span<const Element> stream) {
  const auto d = static_cast<std::size_t>(system.dimension());
  auto points = box_points(system, sample, stream);
  std::vector<std::vector<std::int64_t>> axis_values(d);
  for (const auto& p : points)
    for (std::size_t a = 0; a < d; ++a) axis_values[a].push_back(p.coords[a]);
  std::vector<std::size_t> dims(d);
  for (std::size_t a = 0; a < d; ++a) {
    auto& v = axis_values[a];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    dims[a] = v.size();
  }
  std::size_t cells = 1;
  for (auto n : dims) cells *= n;
  std::vector<Wide> tensor(cells, 0);
  for (const auto& p : points) {
    std::size_t index = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const auto pos = std::lower_bound(axis_values[a].begin(), axis_values[a].end(), p.coords[a]) -
                       axis_values[a].begin();
      index = index * dims[a] + static_cast<std::size_t>(pos);
    }
    tensor[index] += p.weight;
  }
  return boxes_from_extreme(extreme_boxes(tensor, dims), axis_values, d, sample.size(), stream.size());
}

// Every box of [m]^d, each summed in O(2^d) from a (m+1)^d prefix-sum table.
GapReport boxes_enumerate(const SetSystem& system, std::span<const Element> sample,
                          std::span<const Element> stream) {
  const auto d = static_cast<std::size_t>(system.dimension());
  const auto m = static_cast<std::size_t>(system.side());
  std::vector<std::size_t> stride(d);
  std::size_t cells = 1;
  for (std::size_t a = d; a-- > 0;) stride[a] = cells, cells *= (m + 1);
  std::vector<Wide> table(cells, 0);
  for (const auto& p : box_points(system, sample, stream)) {
    std::size_t index = 0;
    for (std::size_t a = 0; a < d; ++a) index += static_cast<std::size_t>(p.coords[a]) * stride[a];
    table[index] += p.weight;
  }
  // In-place prefix sums along each axis.
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t index = 0; index < cells; ++index)
      if ((index / stride[a]) % (m + 1) != 0) table[index] += table[index - stride[a]];

  std::vector<std::size_t> lo(d, 1), hi(d, 1);
  std::vector<std::size_t> best_lo = lo, best_hi = hi;
  Wide best = 0;
  for (;;) {
    Wide sum = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      std::size_t index = 0;
      int sign = 1;
      for (std::size_t a = 0; a < d; ++a) {
        if (mask >> a & 1) index += (lo[a] - 1) * stride[a], sign = -sign;
        else index += hi[a] * stride[a];
      }
      sum += sign * table[index];
    }
    if (wide_abs(sum) > best) best = wide_abs(sum), best_lo = lo, best_hi = hi;
    // Odometer over (lo_a <= hi_a) pairs, last axis fastest.
    std::size_t a = d;
    while (a > 0) {
      --a;
      if (hi[a] < m) { ++hi[a]; break; }
      if (lo[a] < m) { ++lo[a]; hi[a] = lo[a]; break; }
      lo[a] = hi[a] = 1;
      if (a == 0) goto done;
    }
  }
done:
  BoxRange box;
  for (std::size_t a = 0; a < d; ++a) {
    box.lo.push_back(static_cast<std::int64_t>(best_lo[a]));
    box.hi.push_back(static_cast<std::int64_t>(best_hi[a]));
  }
  return {make_gap(best, sample.size(), stream.size()), std::move(box)};
}

constexpr std::uint64_t kEnumerateLimit = 1'000'000;

}  // namespace

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::PrefixIntervals: return "prefix";
    case SystemKind::AllIntervals: return "intervals";
    case SystemKind::Singletons: return "singletons";
    case SystemKind::AxisBoxes: return "boxes";
  }
  return "?";
}

SystemKind parse_system_kind(std::string_view name) {
  if (name == "prefix") return SystemKind::PrefixIntervals;
  if (name == "intervals") return SystemKind::AllIntervals;
  if (name == "singletons") return SystemKind::Singletons;
  if (name == "boxes") return SystemKind::AxisBoxes;
  throw ConfigError("system: expected prefix|intervals|singletons|boxes, got '" + std::string(name) + "'");
}

std::string describe(const Range& range) {
  std::ostringstream out;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PrefixRange>) {
          out << "[1," << r.b << "]";
        } else if constexpr (std::is_same_v<T, IntervalRange>) {
          out << "[" << r.a << "," << r.b << "]";
        } else if constexpr (std::is_same_v<T, SingletonRange>) {
          out << "{" << r.a << "}";
        } else {
          for (std::size_t a = 0; a < r.lo.size(); ++a)
            out << (a ? "x" : "") << "[" << r.lo[a] << "," << r.hi[a] << "]";
        }
      },
      range);
  return out.str();
}

SetSystem SetSystem::prefix(BigInt universe_size) {
  if (universe_size < 1) throw ConfigError("N: universe size must be at least 1");
  return {SystemKind::PrefixIntervals, std::move(universe_size), 0, 0};
}

SetSystem SetSystem::intervals(BigInt universe_size) {
  if (universe_size < 1) throw ConfigError("N: universe size must be at least 1");
  return {SystemKind::AllIntervals, std::move(universe_size), 0, 0};
}

SetSystem SetSystem::singletons(BigInt universe_size) {
  if (universe_size < 1) throw ConfigError("N: universe size must be at least 1");
  return {SystemKind::Singletons, std::move(universe_size), 0, 0};
}

SetSystem SetSystem::boxes(std::int64_t m, std::int64_t d) {
  if (m < 1) throw ConfigError("m: box side must be at least 1");
  if (d < 1 || d > 16) throw ConfigError("d: box dimension must lie in [1,16]");
  return {SystemKind::AxisBoxes, boost::multiprecision::pow(BigInt(m), static_cast<unsigned>(d)), m, d};
}

BigInt SetSystem::cardinality() const {
  switch (kind_) {
    case SystemKind::PrefixIntervals:
    case SystemKind::Singletons:
      return universe_size_;
    case SystemKind::AllIntervals:
      return universe_size_ * (universe_size_ + 1) / 2;
    case SystemKind::AxisBoxes:
      return boost::multiprecision::pow(BigInt(m_) * (m_ + 1) / 2, static_cast<unsigned>(d_));
  }
  return 0;
}

std::vector<std::int64_t> SetSystem::decode_point(const Element& x) const {
  if (!in_universe(x)) throw DomainError("point " + x.str() + " outside the universe");
  std::vector<std::int64_t> coords(static_cast<std::size_t>(d_));
  BigInt rest = x - 1;
  for (auto& c : coords) {
    c = static_cast<std::int64_t>((rest % m_).convert_to<std::int64_t>()) + 1;
    rest /= m_;
  }
  return coords;
}

Element SetSystem::encode_point(std::span<const std::int64_t> coords) const {
  if (coords.size() != static_cast<std::size_t>(d_)) throw DomainError("point has the wrong dimension");
  Element x = 0;
  for (std::size_t a = coords.size(); a-- > 0;) {
    if (coords[a] < 1 || coords[a] > m_) throw DomainError("coordinate outside [1,m]");
    x = x * m_ + (coords[a] - 1);
  }
  return x + 1;
}

bool SetSystem::contains(const Range& range, const Element& x) const {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PrefixRange>) {
          return x >= 1 && x <= r.b;
        } else if constexpr (std::is_same_v<T, IntervalRange>) {
          return x >= r.a && x <= r.b;
        } else if constexpr (std::is_same_v<T, SingletonRange>) {
          return x == r.a;
        } else {
          if (!in_universe(x)) return false;
          const auto c = decode_point(x);
          for (std::size_t a = 0; a < c.size(); ++a)
            if (c[a] < r.lo[a] || c[a] > r.hi[a]) return false;
          return true;
        }
      },
      range);
}

void SetSystem::check_range(const Range& range) const {
  const bool ok = std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PrefixRange>) {
          return kind_ == SystemKind::PrefixIntervals && in_universe(r.b);
        } else if constexpr (std::is_same_v<T, IntervalRange>) {
          return kind_ == SystemKind::AllIntervals && in_universe(r.a) && in_universe(r.b) && r.a <= r.b;
        } else if constexpr (std::is_same_v<T, SingletonRange>) {
          return kind_ == SystemKind::Singletons && in_universe(r.a);
        } else {
          if (kind_ != SystemKind::AxisBoxes) return false;
          if (r.lo.size() != static_cast<std::size_t>(d_) || r.hi.size() != r.lo.size()) return false;
          for (std::size_t a = 0; a < r.lo.size(); ++a)
            if (r.lo[a] < 1 || r.lo[a] > r.hi[a] || r.hi[a] > m_) return false;
          return true;
        }
      },
      range);
  if (!ok) throw ConfigError("range " + describe(range) + " is not a member of the " +
                             std::string(to_string(kind_)) + " system");
}

Rational density(const SetSystem& system, const Range& range, std::span<const Element> seq) {
  if (seq.empty()) throw DomainError("density of an empty sequence is undefined");
  std::uint64_t hits = 0;
  for (const auto& x : seq) hits += system.contains(range, x) ? 1 : 0;
  return Rational(hits, seq.size());
}

GapReport max_density_gap(std::span<const Element> sample, std::span<const Element> stream,
                          const SetSystem& system, BoxStrategy boxes) {
  if (sample.empty()) throw DomainError("epsilon-approximation requires a non-empty sample");
  if (stream.empty()) throw DomainError("epsilon-approximation requires a non-empty stream");
  if (system.kind() != SystemKind::AxisBoxes)
    return sweep_1d(count_values(sample, stream), system.kind(), stream.size(), sample.size());
  if (boxes == BoxStrategy::Auto)
    boxes = system.cardinality() <= kEnumerateLimit ? BoxStrategy::Enumerate : BoxStrategy::Sweep;
  if (boxes == BoxStrategy::Enumerate && system.cardinality() > kEnumerateLimit)
    throw ConfigError("box enumeration is limited to 10^6 ranges");
  return boxes == BoxStrategy::Enumerate ? boxes_enumerate(system, sample, stream)
                                         : boxes_sweep(system, sample, stream);
}

ApproxVerdict is_eps_approximation(std::span<const Element> sample, std::span<const Element> stream,
                                   const SetSystem& system, const Rational& eps, BoxStrategy boxes) {
  auto report = max_density_gap(sample, stream, system, boxes);
  const bool ok = report.gap <= eps;
  return {ok, std::move(report.gap), std::move(report.witness)};
}

Rational approx_after_substitution(const Rational& alpha, std::uint64_t v, std::uint64_t k) {
  if (k == 0) throw DomainError("approx_after_substitution: k must be positive");
  if (v > k) throw DomainError("approx_after_substitution: v must not exceed k");
  return alpha + Rational(v, k);
}

Rational approx_after_growth(const Rational& alpha, const Rational& beta) {
  if (alpha < 0 || beta < 0) throw DomainError("approx_after_growth: alpha and beta must be non-negative");
  return alpha + beta;
}

// ---- IncrementalVerifier ----------------------------------------------------

IncrementalVerifier::IncrementalVerifier(SetSystem system) : system_(std::move(system)) {
  if (system_.kind() == SystemKind::AxisBoxes)
    throw ConfigError("incremental verification supports one-dimensional systems only");
}

IncrementalVerifier::Entry& IncrementalVerifier::entry(const Element& x) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), x,
                             [](const Entry& e, const Element& v) { return e.value < v; });
  if (it == entries_.end() || it->value != x) it = entries_.insert(it, Entry{x, 0, 0});
  return *it;
}

void IncrementalVerifier::add_stream(const Element& x) {
  ++entry(x).in_stream;
  ++stream_size_;
}

void IncrementalVerifier::add_sample(const Element& x) {
  ++entry(x).in_sample;
  ++sample_size_;
}

void IncrementalVerifier::remove_sample(const Element& x) {
  auto& e = entry(x);
  if (e.in_sample == 0) throw std::logic_error("remove_sample: value not in sample");
  --e.in_sample;
  --sample_size_;
}

GapReport IncrementalVerifier::max_gap() const {
  if (sample_size_ == 0) throw DomainError("epsilon-approximation requires a non-empty sample");
  if (stream_size_ == 0) throw DomainError("epsilon-approximation requires a non-empty stream");
  return sweep_1d(entries_, system_.kind(), stream_size_, sample_size_);
}

ApproxVerdict IncrementalVerifier::check(const Rational& eps) const {
  auto report = max_gap();
  const bool ok = report.gap <= eps;
  return {ok, std::move(report.gap), std::move(report.witness)};
}

}  // namespace robust
