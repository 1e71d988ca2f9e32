#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "uqkit/calibration_metrics.hpp"
#include "uqkit/error.hpp"
#include "uqkit/rng.hpp"

namespace uqkit {
namespace {

ProbVector random_probs(Rng& rng, std::size_t v) {
  std::vector<double> logits(v);
  for (auto& z : logits) z = rng.normal(0, 1.5);
  return ProbVector::softmax(logits);
}

TEST(Ece, HandCases) {
  EXPECT_EQ(ece(std::vector<double>{1, 1, 1}, std::vector<int>{1, 1, 1}), 0.0);
  EXPECT_NEAR(ece(std::vector<double>{0.8, 0.8, 0.8, 0.8}, std::vector<int>{1, 0, 1, 0}, 1), 0.3, 1e-15);
  const auto r = ece_report(std::vector<double>{1.0, 0.05}, std::vector<int>{1, 0}, 10);
  EXPECT_EQ(r.bins[9].count, 1u);
  EXPECT_EQ(r.bins[0].count, 1u);
  EXPECT_THROW(ece(std::vector<double>{}, std::vector<int>{}), Error);
  EXPECT_THROW(ece(std::vector<double>{0.5}, std::vector<int>{2}), Error);
}

TEST(Ece, MatchesBinningOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 200;
    std::vector<double> conf(n);
    std::vector<int> correct(n);
    for (std::size_t i = 0; i < n; ++i) {
      conf[i] = trial % 4 == 0 ? std::round(rng.uniform() * 20) / 20 : rng.uniform();
      correct[i] = rng.uniform() < conf[i];
    }
    const std::size_t bins = 1 + rng.below(20);
    EXPECT_NEAR(ece(conf, correct, bins), oracle::ece(conf, correct, bins), 1e-12);
  }
}

TEST(Coverage, Extremes) {
  const std::vector<std::size_t> sizes{1, 5, 10, 3};
  const auto all = coverage_report(sizes, std::vector<int>{1, 1, 1, 1}, 0.1, 10, 5);
  EXPECT_EQ(all.coverage, 1.0);
  EXPECT_EQ(all.ecg, 0.0);
  EXPECT_EQ(all.ssc, 1.0);
  EXPECT_NEAR(all.width, 19.0 / 40.0, 1e-15);
  const auto none = coverage_report(sizes, std::vector<int>{0, 0, 0, 0}, 0.1, 10, 5);
  EXPECT_EQ(none.coverage, 0.0);
  EXPECT_NEAR(none.ecg, 0.9, 1e-15);
  EXPECT_EQ(none.ssc, 0.0);
  EXPECT_THROW(coverage_report(std::vector<std::size_t>{11}, std::vector<int>{1}, 0.1, 10, 5), Error);
}

TEST(Coverage, FromSetsAgreesWithSizes) {
  std::vector<PredictionSet> sets(3);
  sets[0].indices = {0, 1};
  sets[1].indices = {2};
  sets[2].indices = {1, 2, 3};
  const std::vector<std::size_t> labels{1, 0, 3};
  const auto a = coverage_report(sets, labels, 0.2, 4, 4);
  const auto b = coverage_report(std::vector<std::size_t>{2, 1, 3}, std::vector<int>{1, 0, 1}, 0.2, 4, 4);
  EXPECT_EQ(a.coverage, b.coverage);
  EXPECT_EQ(a.ecg, b.ecg);
  EXPECT_EQ(a.ssc, b.ssc);
}

TEST(Coverage, MatchesPerBinOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t vocab = 2 + rng.below(200);
    const std::size_t bins = 1 + rng.below(80);
    const std::size_t n = 1 + rng.below(300);
    std::vector<std::size_t> sizes(n);
    std::vector<int> covered(n);
    for (std::size_t i = 0; i < n; ++i) {
      sizes[i] = rng.below(vocab + 1);
      covered[i] = rng.uniform() < 0.8;
    }
    const double alpha = rng.uniform(0.05, 0.3);
    const auto got = coverage_report(sizes, covered, alpha, vocab, bins);
    const auto want = oracle::coverage(sizes, covered, alpha, vocab, bins);
    EXPECT_NEAR(got.coverage, want.coverage, 1e-12);
    EXPECT_NEAR(got.width, want.width, 1e-12);
    EXPECT_NEAR(got.ssc, want.ssc, 1e-12);
    EXPECT_NEAR(got.ecg, want.ecg, 1e-12);
  }
}

TEST(Brier, Formula) {
  EXPECT_EQ(brier(std::vector<double>{1.0}, std::vector<int>{1}), 0.0);
  EXPECT_EQ(brier(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}), 0.25);
  Rng rng(3);
  std::vector<double> c(50);
  std::vector<int> y(50);
  double want = 0;
  for (int i = 0; i < 50; ++i) {
    c[i] = rng.uniform();
    y[i] = rng.below(2);
    want += (c[i] - y[i]) * (c[i] - y[i]) / 50;
  }
  EXPECT_NEAR(brier(c, y), want, 1e-14);
}

TEST(Auroc, HandCasesAndOracle) {
  EXPECT_EQ(auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(auroc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{0, 1, 1}), 0.5);
  try {
    auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("undefined"), std::string::npos);
  }
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(30);
    std::vector<int> y(30);
    for (int i = 0; i < 30; ++i) {
      s[i] = std::round(rng.uniform() * 8);
      y[i] = i < 2 ? i : static_cast<int>(rng.below(2));
    }
    EXPECT_NEAR(auroc(s, y), oracle::auroc(s, y), 1e-12);
  }
}

TEST(Aupr, StepIntegration) {
  EXPECT_EQ(aupr(std::vector<double>{0.9, 0.8, 0.1}, std::vector<int>{1, 1, 0}), 1.0);
  // Ranking 1,0,1: AP = 0.5 * 1 + 0.5 * 2/3.
  EXPECT_NEAR(aupr(std::vector<double>{0.9, 0.5, 0.2}, std::vector<int>{1, 0, 1}), 0.5 + 1.0 / 3.0, 1e-15);
  // A tie group enters once at its combined precision.
  EXPECT_NEAR(aupr(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}), 0.5, 1e-15);
  EXPECT_THROW(aupr(std::vector<double>{0.1}, std::vector<int>{0}), Error);
}

TEST(Kendall, HandCasesAndOracle) {
  EXPECT_NEAR(kendall_tau_b(std::vector<double>{1, 2, 3, 4}, std::vector<double>{10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(kendall_tau_b(std::vector<double>{1, 2, 3, 4}, std::vector<double>{4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_THROW(kendall_tau_b(std::vector<double>{1, 1}, std::vector<double>{1, 2}), Error);
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(6));
      y[i] = static_cast<double>(rng.below(6));
    }
    x[0] = 0;
    x[1] = 1;
    y[0] = 0;
    y[1] = 1;
    EXPECT_NEAR(kendall_tau_b(x, y), oracle::kendall_tau_b(x, y), 1e-12);
  }
}

TEST(Uncertainty, Uniform) {
  const ProbVector p({0.25, 0.25, 0.25, 0.25});
  EXPECT_NEAR(predictive_entropy(p), std::log(4.0), 1e-15);
  EXPECT_EQ(softmax_gap(p), 0.0);
  EXPECT_EQ(max_prob(p), 0.25);
  EXPECT_EQ(max_prob_uncertainty(p), 0.75);
  EXPECT_EQ(predictive_entropy(ProbVector({1.0, 0.0})), 0.0);
  EXPECT_EQ(dempster_shafer(std::vector<double>{0, 0, 0, 0}), 0.5);
  EXPECT_NEAR(dempster_shafer(std::vector<double>{1000, 0}), 2 * std::exp(-1000.0), 1e-300);
  EXPECT_THROW(dempster_shafer(std::vector<double>{1}), Error);
}

TEST(Ensemble, IdenticalRowsAgree) {
  Rng rng(6);
  const auto p = random_probs(rng, 5);
  const std::vector<ProbVector> rows(6, p);
  EXPECT_EQ(variation_ratio(rows), 0.0);
  EXPECT_EQ(class_variance(rows), 0.0);
  EXPECT_NEAR(bma_mutual_information(rows), 0.0, 1e-15);
}

TEST(Ensemble, VariationRatioCounts) {
  EXPECT_DOUBLE_EQ(variation_ratio(std::vector<std::size_t>{2, 1, 1, 2, 3}), 0.6);
  EXPECT_THROW(variation_ratio(std::vector<std::size_t>{}), Error);
}

TEST(Ensemble, MutualInformationMatchesTwoPassOracle) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ProbVector> rows;
    std::vector<std::vector<double>> raw;
    for (int b = 0; b < 8; ++b) {
      rows.push_back(random_probs(rng, 5));
      raw.emplace_back(rows.back().probs().begin(), rows.back().probs().end());
    }
    EXPECT_NEAR(bma_mutual_information(rows), oracle::mutual_information(raw), 1e-12);
    double variance = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      double m = 0;
      for (const auto& r : raw) m += r[k] / 8;
      for (const auto& r : raw) variance += (r[k] - m) * (r[k] - m) / 8 / 5;
    }
    EXPECT_NEAR(class_variance(rows), variance, 1e-14);
  }
}

TEST(Aggregate, MeanAndMax) {
  const std::vector<double> v{0.1, 0.5, 0.3};
  EXPECT_DOUBLE_EQ(aggregate(v, Aggregation::kMean), 0.3);
  EXPECT_EQ(aggregate(v, Aggregation::kMax), 0.5);
  EXPECT_EQ(parse_aggregation("max"), Aggregation::kMax);
  EXPECT_THROW(aggregate(std::vector<double>{}, Aggregation::kMean), Error);
}

}  // namespace
}  // namespace uqkit
