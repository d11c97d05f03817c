#pragma once

// Closed-form sample-size calculators.
//
// Logarithms are evaluated at 50 significant digits. Sizes that guarantee
// robustness are rounded up; thresholds below which the attack applies are
// rounded down. Either way the reported number errs on the safe side.

#include <cstdint>
#include <optional>

#include "robust/numeric.hpp"

namespace robust {

struct RobustnessSpec {
  Rational eps;
  Rational delta;
  std::uint64_t n = 1;
  BigInt system_cardinality = 1;
  std::optional<std::uint64_t> vc_dimension;  // informational only

  /// Throws ConfigError unless 0 < eps <= 1, 0 < delta < 1, n >= 1 and |R| >= 1.
  void validate() const;
};

/// 10 (ln|R| + ln(4/delta)) / (eps^2 n), capped at 1.
Rational bernoulli_p_robust(const RobustnessSpec& spec);

/// ceil(2 (ln|R| + ln(2/delta)) / eps^2).
std::uint64_t reservoir_k_robust(const RobustnessSpec& spec);

struct SingleRangeBounds {
  Rational p;       // 10 ln(4/delta) / (eps^2 n), capped at 1
  std::uint64_t k;  // ceil(2 ln(2/delta) / eps^2)
};

/// Per-range thresholds, independent of |R|.
SingleRangeBounds single_range_bounds(const RobustnessSpec& spec);

inline const Rational kDefaultContinuousConstant{8};
inline const Rational kDefaultAttackConstant{1, 12};

/// ceil(c (ln|R| + ln(1/delta) + ln(1/eps) + max(0, ln ln n)) / eps^2).
std::uint64_t reservoir_k_continuous(const RobustnessSpec& spec, const Rational& c = kDefaultContinuousConstant);

struct AttackRegime {
  Rational bernoulli_p_threshold;    // c ln N / (n ln n), rounded down
  Rational reservoir_k_threshold;    // c ln N / ln n, rounded down
  bool universe_ok = false;          // n^(6 ln n) <= N <= 2^(n/2)
  HighFloat log_lower;               // 6 (ln n)^2
  HighFloat log_upper;               // (n/2) ln 2
  bool window_nonempty = false;      // log_lower <= log_upper
};

/// Thresholds below which the binary-search attack defeats the samplers on
/// the prefix system over [N] (|R| = N). Needs n >= 2.
AttackRegime attack_regime(const RobustnessSpec& spec, const BigInt& universe_size,
                           const Rational& c = kDefaultAttackConstant);

enum class Application { Quantiles, HeavyHitters, RangeQueriesBoxes };

struct ApplicationParams {
  Rational p;
  std::uint64_t k;
  Rational eps_used;       // eps/3 for heavy hitters, eps otherwise
  BigInt cardinality;      // |R| of the application's set system
};

/// Maps the application to its set system and applies the robust bounds.
/// `universe_size` is N for quantiles and heavy hitters; m and d describe the
/// box universe [m]^d.
ApplicationParams application_params(Application app, const RobustnessSpec& spec, const BigInt& universe_size,
                                     std::int64_t m = 0, std::int64_t d = 0);

}  // namespace robust
