#include <gtest/gtest.h>

#include "robust/applications.hpp"
#include "robust/oracles.hpp"
#include "robust/selftest.hpp"

using namespace robust;

namespace {

using Elements = std::vector<Element>;

Elements iota(int lo, int hi) {
  Elements v;
  for (int x = lo; x <= hi; ++x) v.emplace_back(x);
  return v;
}

}  // namespace

TEST(Rank, Examples) {
  EXPECT_EQ(estimate_rank(5, Elements{2, 4, 6}, 30), 20);
  EXPECT_EQ(estimate_rank(1, Elements{2, 4, 6}, 30), 0);
  EXPECT_EQ(estimate_rank(6, Elements{2, 4, 6}, 30), 30);
  EXPECT_EQ(estimate_rank(3, Elements{2, 4}, 5), Rational(5, 2));
}

TEST(Rank, MonotoneInTarget) {
  CounterRng rng(derive_seed(31, 0), Stream::Aux);
  for (int it = 0; it < 100; ++it) {
    const auto inst = oracle::random_instance(rng, SetSystem::prefix(50), 30);
    Rational last = 0;
    for (int t = 0; t <= 51; ++t) {
      const auto r = estimate_rank(t, inst.sample, inst.stream.size());
      ASSERT_GE(r, last);
      last = r;
    }
    EXPECT_EQ(last, static_cast<std::int64_t>(inst.stream.size()));
  }
}

TEST(Quantile, Examples) {
  EXPECT_EQ(estimate_quantile(Rational(1, 2), iota(1, 100)), 50);
  EXPECT_EQ(estimate_quantile(Rational(1, 2), Elements{9, 7, 3}), 7);
  EXPECT_EQ(estimate_quantile(Rational(1, 100), Elements{9, 7, 3}), 3);
  EXPECT_EQ(estimate_quantile(Rational(99, 100), Elements{9, 7, 3}), 9);
  EXPECT_THROW(estimate_quantile(0, Elements{1}), DomainError);
  EXPECT_THROW(estimate_quantile(1, Elements{1}), DomainError);
}

TEST(HeavyHitters, Examples) {
  EXPECT_EQ(heavy_hitters(Elements{5, 5, 5, 5}, Rational(1, 2), Rational(1, 4)), Elements{5});
  EXPECT_EQ(heavy_hitters(Elements{1, 2, 2, 3, 3, 3}, Rational(1, 3), Rational(1, 10)), (Elements{2, 3}));
  EXPECT_THROW(heavy_hitters(Elements{1}, Rational(1, 4), Rational(1, 4)), DomainError);
  EXPECT_THROW(heavy_hitters(Elements{1}, Rational(1, 4), 0), DomainError);
}

TEST(HeavyHitters, ShrinkAsAlphaGrows) {
  CounterRng rng(derive_seed(32, 0), Stream::Aux);
  const Rational eps(1, 20);
  for (int it = 0; it < 100; ++it) {
    const auto inst = oracle::random_instance(rng, SetSystem::singletons(8), 40);
    std::size_t last = SIZE_MAX;
    for (int a = 2; a <= 10; ++a) {
      const auto h = heavy_hitters(inst.sample, Rational(a, 10), eps);
      ASSERT_LE(h.size(), last);
      ASSERT_TRUE(std::is_sorted(h.begin(), h.end()));
      last = h.size();
    }
  }
}

TEST(RangeCount, Examples) {
  EXPECT_EQ(answer_range_query(SetSystem::intervals(9), IntervalRange{1, 4}, Elements{1, 3, 9}, 9), 6);
  const auto boxes = SetSystem::boxes(3, 2);
  const std::int64_t a[] = {1, 1}, b[] = {3, 3};
  const Elements pts{boxes.encode_point(a), boxes.encode_point(b)};
  EXPECT_EQ(answer_range_query(boxes, BoxRange{{1, 1}, {2, 2}}, pts, 10), 5);
  EXPECT_THROW(answer_range_query(boxes, BoxRange{{1}, {2}}, pts, 10), ConfigError);
}

TEST(Center, Examples) {
  EXPECT_EQ(center_point_1d(iota(1, 5), Rational(1, 5)), 3);
  EXPECT_EQ(center_point_1d(iota(1, 100), Rational(1, 4)), 50);
  EXPECT_TRUE(oracle::is_beta_center(50, iota(1, 100), Rational(1, 4)));
  EXPECT_THROW(center_point_1d(iota(1, 4), Rational(1, 2)), DomainError);
  EXPECT_THROW(center_point_1d(iota(1, 4), Rational(3, 5)), DomainError);
  EXPECT_THROW(center_point_1d(iota(1, 4), 0), DomainError);
}

TEST(Applications, EmptySampleIsADomainError) {
  const Elements none;
  EXPECT_THROW(estimate_rank(1, none, 5), DomainError);
  EXPECT_THROW(estimate_quantile(Rational(1, 2), none), DomainError);
  EXPECT_THROW(heavy_hitters(none, Rational(1, 2), Rational(1, 4)), DomainError);
  EXPECT_THROW(answer_range_query(SetSystem::prefix(4), PrefixRange{2}, none, 5), DomainError);
  EXPECT_THROW(center_point_1d(none, Rational(1, 5)), DomainError);
}

TEST(Applications, GuaranteesHoldOnApproximatingSamples) {
  const auto report = audit_applications(33, 1500);
  EXPECT_GT(report.checked, 100u);
  EXPECT_EQ(report.violations, 0u) << report.first_violation;
}
