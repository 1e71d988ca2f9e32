#include <gtest/gtest.h>

#include <numeric>

#include "uqkit/empirical.hpp"
#include "uqkit/error.hpp"
#include "uqkit/rng.hpp"

namespace uqkit {
namespace {

TEST(Sample, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Sample(std::vector<double>{}), Error);
  EXPECT_THROW(Sample({1.0, std::nan("")}), Error);
}

TEST(EmpiricalCdf, CountsAtOrBelow) {
  const Sample s{1, 2, 3};
  EXPECT_DOUBLE_EQ(empirical_cdf(s, 2), 2.0 / 3.0);
  EXPECT_EQ(empirical_cdf(s, 0.5), 0.0);
  EXPECT_EQ(empirical_cdf(s, 3), 1.0);
}

TEST(EmpiricalQuantile, IndexRule) {
  EXPECT_EQ(empirical_quantile(Sample{1, 2, 3, 4}, 0.5), 2.0);
  EXPECT_EQ(empirical_quantile(Sample{1, 2, 3, 4}, 0.99), 4.0);
  EXPECT_EQ(empirical_quantile(Sample{4, 1, 3, 2}, 0.26), 2.0);
  for (double p : {0.01, 0.3, 0.999}) EXPECT_EQ(empirical_quantile(Sample{5}, p), 5.0);
}

TEST(EmpiricalQuantile, RangeChecked) {
  try {
    empirical_quantile(Sample{1, 2}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "quantile level out of range");
  }
  EXPECT_THROW(empirical_quantile(Sample{1, 2}, 0.0), Error);
}

TEST(EmpiricalQuantile, IsGeneralisedInverseOfCdf) {
  Rng rng(3);
  std::vector<double> xs(37);
  for (auto& x : xs) x = std::round(rng.normal() * 4);  // many ties
  const Sample s(xs);
  for (int i = 1; i < 200; ++i) {
    const double p = i / 200.0;
    const double q = empirical_quantile(s, p);
    EXPECT_GE(empirical_cdf(s, q), p - 1e-12);
    for (double x : xs) {
      if (x < q) EXPECT_LT(empirical_cdf(s, x), p);
    }
  }
}

TEST(Bootstrap, SingletonAndDeterminism) {
  Rng rng(1);
  const auto r = bootstrap_resample(Sample{5}, 10, rng);
  ASSERT_EQ(r.size(), 10u);
  for (double x : r.values()) EXPECT_EQ(x, 5.0);

  Rng a(42);
  Rng b(42);
  const Sample s{1, 2, 3, 4, 5};
  const auto ra = bootstrap_resample(s, 50, a);
  const auto rb = bootstrap_resample(s, 50, b);
  EXPECT_TRUE(std::equal(ra.values().begin(), ra.values().end(), rb.values().begin()));
  Rng c(0);
  EXPECT_THROW(bootstrap_resample(s, 0, c), Error);
}

TEST(Bootstrap, MeanOfLargeResample) {
  Rng rng(11);
  const Sample s{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto r = bootstrap_resample(s, 100000, rng);
  const double mean = std::accumulate(r.values().begin(), r.values().end(), 0.0) / 1e5;
  EXPECT_NEAR(mean, 4.5, 0.1);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(9, 4), derive_seed(9, 4));
  Rng rng(5);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) ++counts[rng.below(3)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

}  // namespace
}  // namespace uqkit
