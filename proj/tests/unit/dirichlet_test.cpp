#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dirichlet_oracle.hpp"
#include "uqkit/calibration_metrics.hpp"
#include "uqkit/dirichlet.hpp"
#include "uqkit/error.hpp"
#include "uqkit/rng.hpp"

namespace uqkit {
namespace {

std::vector<double> random_alpha(Rng& rng, std::size_t k) {
  std::vector<double> a(k);
  for (auto& x : a) x = rng.uniform(0.2, 10);
  return a;
}

TEST(Dirichlet, Mean) {
  const auto m = mean(DirichletParams({1, 1, 1}));
  for (double x : m.probs()) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
  const auto m2 = mean(DirichletParams({2, 1, 1}));
  EXPECT_DOUBLE_EQ(m2[0], 0.5);
  EXPECT_DOUBLE_EQ(m2[1], 0.25);
}

TEST(Dirichlet, Validation) {
  EXPECT_THROW(DirichletParams({1.0}), Error);
  EXPECT_THROW(DirichletParams({1.0, 1e-4}), Error);
  EXPECT_NO_THROW(DirichletParams({1.0, 1e-3}));
  EXPECT_THROW(kl(DirichletParams({1, 1}), DirichletParams({1, 1, 1})), Error);
}

TEST(Dirichlet, LogExpectation) {
  EXPECT_NEAR(log_expectation(DirichletParams({1, 1}), 0), -1.0, 1e-12);
  const DirichletParams sym({3, 3, 3, 3});
  EXPECT_EQ(log_expectation(sym, 0), log_expectation(sym, 3));
}

TEST(Dirichlet, EntropyCases) {
  EXPECT_NEAR(entropy(DirichletParams({1, 1})), 0.0, 1e-12);
  EXPECT_NEAR(entropy(DirichletParams({2, 5, 0.5})), entropy(DirichletParams({0.5, 2, 5})), 1e-12);
  // Uniform on the 2-simplex has density Gamma(3) = 2.
  EXPECT_NEAR(entropy(DirichletParams({1, 1, 1})), -std::log(2.0), 1e-12);
}

TEST(Dirichlet, ExpectedEntropyCases) {
  EXPECT_NEAR(expected_entropy(DirichletParams({1, 1})), 0.5, 1e-12);
  EXPECT_NEAR(expected_entropy(DirichletParams(std::vector<double>(5, 1e6))), std::log(5.0), 1e-3);
}

TEST(Dirichlet, KlCases) {
  Rng rng(1);
  const DirichletParams d(random_alpha(rng, 4));
  EXPECT_NEAR(kl(d, d), 0.0, 1e-12);
  EXPECT_NEAR(kl_uniform(DirichletParams({1, 1, 1, 1})), 0.0, 1e-12);
  EXPECT_NEAR(kl_uniform(d), kl(d, DirichletParams({1, 1, 1, 1})), 1e-12);
  EXPECT_GT(kl(d, DirichletParams({1, 2, 3, 4})), 0.0);
}

TEST(Dirichlet, MutualInformationLimitsAndIdentity) {
  EXPECT_NEAR(mutual_information(DirichletParams({5e5, 5e5})), 0.0, 1e-5);
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const DirichletParams d(random_alpha(rng, 2 + rng.below(7)));
    EXPECT_NEAR(predictive_entropy(mean(d)), expected_entropy(d) + mutual_information(d), 1e-10);
    EXPECT_GE(mutual_information(d), 0.0);
  }
}

TEST(Dirichlet, ClosedFormsAgainstIndependentMonteCarlo) {
  Rng rng(3);
  std::mt19937_64 engine(99);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t k = 2 + rng.below(7);
    const auto alpha = random_alpha(rng, k);
    const auto ref_alpha = random_alpha(rng, k);
    const DirichletParams d(alpha);
    const DirichletParams ref(ref_alpha);
    const auto e = oracle::estimate_dirichlet(alpha, ref_alpha, 100000, engine);
    const auto m = mean(d);
    for (std::size_t j = 0; j < k; ++j) {
      EXPECT_LE(std::fabs(e.mean[j].mean - m[j]), 4 * e.mean[j].se());
      EXPECT_LE(std::fabs(e.log_expectation[j].mean - log_expectation(d, j)), 4 * e.log_expectation[j].se());
    }
    EXPECT_LE(std::fabs(e.entropy.mean - entropy(d)), 4 * e.entropy.se());
    EXPECT_LE(std::fabs(e.expected_entropy.mean - expected_entropy(d)), 4 * e.expected_entropy.se());
    EXPECT_LE(std::fabs(e.kl.mean - kl(d, ref)), 4 * e.kl.se());
  }
}

TEST(Dirichlet, LogDensityMatchesReference) {
  const std::vector<double> alpha{0.7, 2.0, 3.5};
  const oracle::DirichletSampler r(alpha);
  const std::vector<double> pi{0.2, 0.3, 0.5};
  EXPECT_NEAR(log_density(DirichletParams(alpha), pi), r.log_density(pi), 1e-12);
}

TEST(Dirichlet, SamplesLieOnSimplex) {
  Rng rng(4);
  const DirichletParams d({0.3, 0.3, 4});
  for (int i = 0; i < 1000; ++i) {
    const auto pi = sample(d, rng);
    double total = 0;
    for (double x : pi) {
      EXPECT_GE(x, 0.0);
      total += x;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Dirichlet, MonteCarloCheckReportsEveryQuantity) {
  Rng rng(5);
  const DirichletParams d({1.5, 2.5, 4.0});
  const auto rows = monte_carlo_check(d, DirichletParams({1, 1, 1}), 20000, rng);
  ASSERT_EQ(rows.size(), 2 * 3 + 4u);
  for (const auto& r : rows) EXPECT_LE(std::fabs(r.z), 5.0) << r.quantity;
  EXPECT_EQ(rows.back().quantity, "mutual_information");
}

}  // namespace
}  // namespace uqkit
