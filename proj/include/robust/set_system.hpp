#pragma once

// Set systems over the universe [N], exact densities, and epsilon-approximation
// verification.
//
// All gaps between a sample S and a stream X share the denominator |S|*|X|, so
// the verifiers work with the integer weight w(x) = |X|*[x in S] - |S|*[x in X]
// summed over a range; the density gap of range R is |sum_R w| / (|S|*|X|).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "robust/numeric.hpp"

namespace robust {

enum class SystemKind { PrefixIntervals, AllIntervals, Singletons, AxisBoxes };

std::string_view to_string(SystemKind kind);
SystemKind parse_system_kind(std::string_view name);

/// [1, b]
struct PrefixRange {
  Element b;
  friend bool operator==(const PrefixRange&, const PrefixRange&) = default;
};
/// [a, b]
struct IntervalRange {
  Element a, b;
  friend bool operator==(const IntervalRange&, const IntervalRange&) = default;
};
/// {a}
struct SingletonRange {
  Element a;
  friend bool operator==(const SingletonRange&, const SingletonRange&) = default;
};
/// [lo_1, hi_1] x ... x [lo_d, hi_d], coordinates in [1, m].
struct BoxRange {
  std::vector<std::int64_t> lo, hi;
  friend bool operator==(const BoxRange&, const BoxRange&) = default;
};

using Range = std::variant<PrefixRange, IntervalRange, SingletonRange, BoxRange>;

std::string describe(const Range& range);

class SetSystem {
 public:
  static SetSystem prefix(BigInt universe_size);
  static SetSystem intervals(BigInt universe_size);
  static SetSystem singletons(BigInt universe_size);
  /// Universe [m]^d, point (c_1..c_d) encoded as 1 + sum_j (c_j - 1) m^(j-1).
  static SetSystem boxes(std::int64_t m, std::int64_t d);

  SystemKind kind() const noexcept { return kind_; }
  const BigInt& universe_size() const noexcept { return universe_size_; }
  std::int64_t side() const noexcept { return m_; }
  std::int64_t dimension() const noexcept { return d_; }

  /// |R|.
  BigInt cardinality() const;

  bool contains(const Range& range, const Element& x) const;
  bool in_universe(const Element& x) const { return x >= 1 && x <= universe_size_; }
  /// Throws ConfigError if the range does not belong to this system.
  void check_range(const Range& range) const;

  std::vector<std::int64_t> decode_point(const Element& x) const;
  Element encode_point(std::span<const std::int64_t> coords) const;

  friend bool operator==(const SetSystem&, const SetSystem&) = default;

 private:
  SetSystem(SystemKind kind, BigInt n, std::int64_t m, std::int64_t d)
      : kind_(kind), universe_size_(std::move(n)), m_(m), d_(d) {}

  SystemKind kind_;
  BigInt universe_size_;
  std::int64_t m_ = 0;
  std::int64_t d_ = 0;
};

/// d_R(seq) = |{i : seq_i in R}| / |seq|. Throws DomainError on empty seq.
Rational density(const SetSystem& system, const Range& range, std::span<const Element> seq);

struct GapReport {
  Rational gap;   // max over R of |d_R(stream) - d_R(sample)|
  Range witness;  // a range attaining `gap`
};

struct ApproxVerdict {
  bool ok = false;  // gap <= eps
  Rational gap;
  Range witness;
};

enum class BoxStrategy { Auto, Enumerate, Sweep };

/// Exact max density gap. Prefix/interval systems use a sorted merge sweep,
/// singletons a per-value scan; boxes enumerate every box when |R| <= 10^6 and
/// otherwise run a coordinate-compressed maximum-box sweep. Throws DomainError
/// if either sequence is empty.
GapReport max_density_gap(std::span<const Element> sample, std::span<const Element> stream,
                          const SetSystem& system, BoxStrategy boxes = BoxStrategy::Auto);

ApproxVerdict is_eps_approximation(std::span<const Element> sample, std::span<const Element> stream,
                                   const SetSystem& system, const Rational& eps,
                                   BoxStrategy boxes = BoxStrategy::Auto);

/// Level guaranteed for a size-k sample after v of its values are substituted,
/// starting from an alpha-approximation: alpha + v/k.
Rational approx_after_substitution(const Rational& alpha, std::uint64_t v, std::uint64_t k);

/// Level guaranteed when the stream grows from |X| to at most (1+beta)|X|
/// while the sample stays fixed: alpha + beta.
Rational approx_after_growth(const Rational& alpha, const Rational& beta);

/// Maintains stream/sample value counts for a one-dimensional system so that
/// the gap can be re-evaluated after every round without re-sorting. Boxes are
/// not supported here.
class IncrementalVerifier {
 public:
  explicit IncrementalVerifier(SetSystem system);

  void add_stream(const Element& x);
  void add_sample(const Element& x);
  void remove_sample(const Element& x);

  std::uint64_t stream_size() const noexcept { return stream_size_; }
  std::uint64_t sample_size() const noexcept { return sample_size_; }

  GapReport max_gap() const;
  ApproxVerdict check(const Rational& eps) const;

 private:
  struct Entry {
    Element value;
    std::int64_t in_stream = 0;
    std::int64_t in_sample = 0;
  };
  Entry& entry(const Element& x);

  SetSystem system_;
  std::vector<Entry> entries_;  // sorted by value, distinct
  std::uint64_t stream_size_ = 0;
  std::uint64_t sample_size_ = 0;
};

}  // namespace robust
