#include <gtest/gtest.h>

#include <cmath>

#include "uqkit/error.hpp"
#include "uqkit/rng.hpp"
#include "uqkit/synthetic_lm.hpp"

namespace uqkit {
namespace {

TEST(SynthModel, DeterministicForSeed) {
  const auto a = new_model(20, 4, 7);
  const auto b = new_model(20, 4, 7);
  EXPECT_EQ(a.emission, b.emission);
  EXPECT_EQ(a.mixing, b.mixing);
  EXPECT_NE(a.emission, new_model(20, 4, 8).emission);
  EXPECT_EQ(a.emission.size(), 80u);
  EXPECT_EQ(a.mixing.size(), 16u);
  EXPECT_NO_THROW(new_model(2, 2, 0));
  EXPECT_THROW(new_model(1, 2, 0), Error);
}

TEST(SynthModel, StepsAreNormalisedAndReproducible) {
  const auto model = new_model(30, 6, 1);
  Rng r1(5);
  Rng r2(5);
  const auto a = generate(model, 200, r1);
  const auto b = generate(model, 200, r2);
  ASSERT_EQ(a.size(), 200u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double total = 0;
    for (double p : a[i].probs.probs()) total += p;
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_EQ(a[i].latent, b[i].latent);
    EXPECT_EQ(a[i].gold, b[i].gold);
    EXPECT_LT(a[i].gold, 30u);
  }
}

TEST(SynthModel, ColdTemperaturePicksArgmax) {
  SynthOptions options;
  options.temperature = 1e-4;
  const auto model = new_model(25, 8, 2, options);
  Rng rng(3);
  const auto steps = generate(model, 1000, rng);
  int argmax = 0;
  for (const auto& s : steps) argmax += s.gold == s.probs.descending_order().front();
  EXPECT_GE(argmax, 990);
}

TEST(SynthModel, TokenFrequenciesFromFrozenLatent) {
  const auto model = new_model(6, 3, 4);
  const std::vector<double> z{0.3, -0.4, 0.8};
  const auto p = token_distribution(model, z);
  Rng rng(6);
  std::vector<double> counts(6, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[step_at(model, z, rng).gold] += 1;
  for (std::size_t k = 0; k < 6; ++k) {
    const double se = std::sqrt(p[k] * (1 - p[k]) / draws);
    EXPECT_LE(std::fabs(counts[k] / draws - p[k]), 3 * se + 1e-12) << k;
  }
}

TEST(InjectNoise, IdentityAndNormMean) {
  Rng rng(7);
  const std::vector<double> z{1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_EQ(inject_noise(z, 0.0, rng), z);
  const double sigma = 0.3;
  double total = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto n = inject_noise(z, sigma, rng);
    double sq = 0;
    for (std::size_t j = 0; j < z.size(); ++j) sq += (n[j] - z[j]) * (n[j] - z[j]);
    total += std::sqrt(sq);
  }
  // E|N(0, s^2 I_8)| = s * sqrt(2) Gamma(4.5) / Gamma(4).
  const double chi_mean = sigma * std::sqrt(2.0) * std::exp(std::lgamma(4.5) - std::lgamma(4.0));
  EXPECT_NEAR(total / 10000, chi_mean, 0.02 * chi_mean);
  EXPECT_NEAR(chi_mean, sigma * std::sqrt(8.0), 0.05 * sigma * std::sqrt(8.0));
  Rng a(1);
  Rng b(1);
  EXPECT_EQ(inject_noise(z, 1.0, a), inject_noise(z, 1.0, b));
  EXPECT_THROW(inject_noise(z, -1.0, a), Error);
}

TEST(CalibrationStore, CountsScoresAndSelfQuery) {
  const auto model = new_model(40, 5, 9);
  Rng rng(10);
  const auto store = build_calibration_store(model, 300, ScoreKind::kAdaptive, rng);
  EXPECT_EQ(store.size(), 300u);
  EXPECT_EQ(store.dim(), 5u);
  for (double s : store.scores()) {
    EXPECT_GT(s, 0.0);
    EXPECT_LE(s, 1.0 + 1e-12);
  }
  std::vector<double> z(store.latent(17).begin(), store.latent(17).end());
  const auto r = store.query(z, 1, Metric::kL2);
  EXPECT_EQ(r[0].index, 17u);
  EXPECT_EQ(r[0].key, 0.0);
}

TEST(CalibrationStore, FromTriples) {
  const auto model = new_model(10, 3, 1);
  Rng rng(2);
  const auto steps = generate(model, 50, rng);
  const auto store = build_calibration_store(steps, ScoreKind::kSimple);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    EXPECT_EQ(store.score(i), score_simple(steps[i].probs, steps[i].gold));
  }
}

}  // namespace
}  // namespace uqkit
