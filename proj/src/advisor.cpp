#include "robust/advisor.hpp"

#include <limits>

namespace robust {
namespace {

// Relative slack that dominates the 50-digit evaluation error.
const HighFloat kSlack("1e-40");

HighFloat up(const HighFloat& v) { return v + abs(v) * kSlack + kSlack; }
HighFloat down(const HighFloat& v) { return v - abs(v) * kSlack - kSlack; }

std::uint64_t ceil_count(const HighFloat& v) {
  const HighFloat c = boost::multiprecision::ceil(up(v));
  if (c > HighFloat(std::numeric_limits<std::uint64_t>::max()))
    throw DomainError("sample size exceeds 64-bit range");
  return c < 1 ? 1 : c.convert_to<std::uint64_t>();
}

Rational capped_probability(const HighFloat& v) {
  Rational p = round_up(up(v));
  return p > 1 ? Rational(1) : p;
}

HighFloat log_of(const BigInt& v) { return boost::multiprecision::log(HighFloat(v)); }

}  // namespace

void RobustnessSpec::validate() const {
  if (eps <= 0 || eps > 1) throw ConfigError("eps: must lie in (0, 1]");
  if (delta <= 0 || delta >= 1) throw ConfigError("delta: must lie strictly between 0 and 1");
  if (n == 0) throw ConfigError("n: must be at least 1");
  if (system_cardinality < 1) throw ConfigError("card: |R| must be at least 1");
}

Rational bernoulli_p_robust(const RobustnessSpec& spec) {
  spec.validate();
  const HighFloat e = to_high(spec.eps);
  const HighFloat v = 10 * (log_of(spec.system_cardinality) + ln(4 / spec.delta)) / (e * e * spec.n);
  return capped_probability(v);
}

std::uint64_t reservoir_k_robust(const RobustnessSpec& spec) {
  spec.validate();
  const HighFloat e = to_high(spec.eps);
  return ceil_count(2 * (log_of(spec.system_cardinality) + ln(2 / spec.delta)) / (e * e));
}

SingleRangeBounds single_range_bounds(const RobustnessSpec& spec) {
  RobustnessSpec one = spec;
  one.system_cardinality = 1;
  return {bernoulli_p_robust(one), reservoir_k_robust(one)};
}

std::uint64_t reservoir_k_continuous(const RobustnessSpec& spec, const Rational& c) {
  spec.validate();
  if (c <= 0) throw ConfigError("c: constant must be positive");
  const HighFloat e = to_high(spec.eps);
  HighFloat lnln = 0;
  if (spec.n > 2) {  // ln ln n < 0 for n <= e
    lnln = boost::multiprecision::log(boost::multiprecision::log(HighFloat(spec.n)));
    if (lnln < 0) lnln = 0;
  }
  const HighFloat sum = log_of(spec.system_cardinality) + ln(1 / spec.delta) + ln(1 / spec.eps) + lnln;
  return ceil_count(to_high(c) * sum / (e * e));
}

AttackRegime attack_regime(const RobustnessSpec& spec, const BigInt& universe_size, const Rational& c) {
  spec.validate();
  if (spec.n < 2) throw ConfigError("n: the attack regime needs n >= 2");
  if (universe_size < 1) throw ConfigError("N: universe size must be at least 1");
  if (c <= 0) throw ConfigError("c: constant must be positive");
  const HighFloat ln_n = boost::multiprecision::log(HighFloat(spec.n));
  const HighFloat ln_N = log_of(universe_size);
  AttackRegime r;
  r.bernoulli_p_threshold = round_down(down(to_high(c) * ln_N / (HighFloat(spec.n) * ln_n)));
  r.reservoir_k_threshold = round_down(down(to_high(c) * ln_N / ln_n));
  r.log_lower = 6 * ln_n * ln_n;
  r.log_upper = HighFloat(spec.n) / 2 * boost::multiprecision::log(HighFloat(2));
  r.window_nonempty = r.log_lower <= r.log_upper;
  // N <= 2^(n/2) exactly as N^2 <= 2^n; the lower end through logarithms.
  const bool below_upper = universe_size * universe_size <= pow2(static_cast<unsigned>(spec.n));
  r.universe_ok = below_upper && ln_N >= r.log_lower;
  return r;
}

ApplicationParams application_params(Application app, const RobustnessSpec& spec, const BigInt& universe_size,
                                     std::int64_t m, std::int64_t d) {
  RobustnessSpec s = spec;
  switch (app) {
    case Application::Quantiles:
      s.system_cardinality = universe_size;
      break;
    case Application::HeavyHitters:
      s.system_cardinality = universe_size;
      s.eps = spec.eps / 3;
      break;
    case Application::RangeQueriesBoxes:
      if (m < 1 || d < 1) throw ConfigError("range queries need m >= 1 and d >= 1");
      s.system_cardinality = boost::multiprecision::pow(BigInt(m) * (m + 1) / 2, static_cast<unsigned>(d));
      break;
  }
  return {bernoulli_p_robust(s), reservoir_k_robust(s), s.eps, s.system_cardinality};
}

}  // namespace robust
