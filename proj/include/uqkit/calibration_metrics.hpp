#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uqkit/conformal.hpp"

namespace uqkit {

// Binary inputs (correctness flags, labels) are ints restricted to {0, 1}.

struct CalibrationBin {
  std::size_t count = 0;
  double mean_confidence = 0.0;
  double accuracy = 0.0;
};

struct EceReport {
  double ece = 0.0;
  std::vector<CalibrationBin> bins;  // num_bins entries, empty bins have count 0
};

/// Equal-width bins on [0, 1]; bin = min(floor(c * M), M - 1) so a
/// confidence of exactly 1 lands in the last bin. Empty bins contribute 0.
EceReport ece_report(std::span<const double> confidences, std::span<const int> correct,
                     std::size_t num_bins = 10);
double ece(std::span<const double> confidences, std::span<const int> correct,
           std::size_t num_bins = 10);

inline constexpr std::size_t kDefaultSizeBins = 75;

struct CoverageBin {
  std::size_t count = 0;
  double coverage = 0.0;
};

struct CoverageReport {
  double coverage = 0.0;  // fraction of sets containing their label
  double width = 0.0;     // mean set size as a fraction of V
  double ssc = 0.0;       // lowest coverage over non-empty size bins
  double ecg = 0.0;       // size-weighted undercoverage relative to 1 - alpha
  std::vector<CoverageBin> bins;
};

/// Sets are binned by size into `num_bins` equal-width bins over [0, V]:
/// bin = min(size * num_bins / V, num_bins - 1) in integer arithmetic.
CoverageReport coverage_report(std::span<const PredictionSet> sets,
                               std::span<const std::size_t> labels, double alpha,
                               std::size_t vocab_size, std::size_t num_bins = kDefaultSizeBins);

/// Same report from precomputed (size, covered) pairs.
CoverageReport coverage_report(std::span<const std::size_t> set_sizes, std::span<const int> covered,
                               double alpha, std::size_t vocab_size,
                               std::size_t num_bins = kDefaultSizeBins);

/// Mean of (confidence - correct)^2.
double brier(std::span<const double> confidences, std::span<const int> correct);

/// Probability that a random positive outranks a random negative, ties
/// counted as one half (mid-rank formula). Throws "undefined" when only one
/// class is present.
double auroc(std::span<const double> scores, std::span<const int> labels);

/// Average precision: sum over distinct score thresholds (descending) of
/// recall increment times precision.
double aupr(std::span<const double> scores, std::span<const int> labels);

/// Kendall's tau-b in O(n log n). Throws when either input is constant.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// 1 - max_k p_k.
double max_prob_uncertainty(const ProbVector& p);
double max_prob(const ProbVector& p);

/// Shannon entropy in nats with 0 log 0 = 0.
double predictive_entropy(const ProbVector& p);

/// Difference of the two largest probabilities.
double softmax_gap(const ProbVector& p);

/// K / (K + sum_k exp z_k), evaluated in log space.
double dempster_shafer(std::span<const double> logits);

/// 1 - (1/B) #{b : y_b = mode}, mode ties resolved to the smallest label.
double variation_ratio(std::span<const std::size_t> predicted);
/// Same, with y_b = argmax of row b (lowest index on ties).
double variation_ratio(std::span<const ProbVector> rows);

/// (1/K) sum_k Var_b[p_bk] with the population variance over the B rows.
double class_variance(std::span<const ProbVector> rows);

/// H[mean row] - mean_b H[row_b].
double bma_mutual_information(std::span<const ProbVector> rows);

enum class Aggregation { kMean, kMax };

std::string_view to_string(Aggregation aggregation);
std::optional<Aggregation> parse_aggregation(std::string_view name);

/// Sequence-level summary of step-wise uncertainties.
double aggregate(std::span<const double> stepwise, Aggregation aggregation);

}  // namespace uqkit
