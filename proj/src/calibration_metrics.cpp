#include "uqkit/calibration_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "uqkit/error.hpp"

namespace uqkit {
namespace {

void require_binary(std::span<const int> flags) {
  for (int f : flags) require(f == 0 || f == 1, "binary flags must be 0 or 1");
}

void require_rows(std::span<const ProbVector> rows) {
  require(!rows.empty(), "prediction matrix has no rows");
  for (const auto& row : rows) {
    require(row.size() == rows.front().size(), "prediction matrix rows differ in length");
  }
}

double entropy_of(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

std::size_t argmax(std::span<const double> p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

// Sorts `y` ascending, returning the number of pairs i < j with y[i] > y[j].
std::int64_t count_inversions(std::vector<double>& y) {
  std::vector<double> buffer(y.size());
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < y.size(); width *= 2) {
    for (std::size_t lo = 0; lo < y.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, y.size());
      const std::size_t hi = std::min(lo + 2 * width, y.size());
      std::size_t i = lo;
      std::size_t j = mid;
      std::size_t k = lo;
      while (i < mid && j < hi) {
        if (y[j] < y[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buffer[k++] = y[j++];
        } else {
          buffer[k++] = y[i++];
        }
      }
      while (i < mid) buffer[k++] = y[i++];
      while (j < hi) buffer[k++] = y[j++];
    }
    y.swap(buffer);
  }
  return swaps;
}

// Sum over runs of equal adjacent elements of t (t - 1) / 2.
template <class Equal>
std::int64_t tied_pairs(std::size_t n, Equal equal) {
  std::int64_t pairs = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      pairs += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  return pairs;
}

}  // namespace

EceReport ece_report(std::span<const double> confidences, std::span<const int> correct,
                     std::size_t num_bins) {
  require(!confidences.empty(), "empty input");
  require(confidences.size() == correct.size(), "confidences and correctness differ in length");
  require(num_bins >= 1, "number of bins must be at least 1");
  require_binary(correct);

  EceReport report;
  report.bins.resize(num_bins);
  std::vector<double> confidence_sum(num_bins, 0.0);
  std::vector<double> correct_sum(num_bins, 0.0);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    require(c >= 0.0 && c <= 1.0, "confidences must lie in [0, 1]");
    const auto bin = std::min(static_cast<std::size_t>(c * static_cast<double>(num_bins)), num_bins - 1);
    ++report.bins[bin].count;
    confidence_sum[bin] += c;
    correct_sum[bin] += correct[i];
  }
  const auto n = static_cast<double>(confidences.size());
  for (std::size_t b = 0; b < num_bins; ++b) {
    auto& bin = report.bins[b];
    if (bin.count == 0) continue;
    const auto count = static_cast<double>(bin.count);
    bin.mean_confidence = confidence_sum[b] / count;
    bin.accuracy = correct_sum[b] / count;
    report.ece += count / n * std::fabs(bin.accuracy - bin.mean_confidence);
  }
  return report;
}

double ece(std::span<const double> confidences, std::span<const int> correct, std::size_t num_bins) {
  return ece_report(confidences, correct, num_bins).ece;
}

CoverageReport coverage_report(std::span<const std::size_t> set_sizes, std::span<const int> covered,
                               double alpha, std::size_t vocab_size, std::size_t num_bins) {
  require(!set_sizes.empty(), "empty input");
  require(set_sizes.size() == covered.size(), "set sizes and coverage flags differ in length");
  require(alpha > 0.0 && alpha < 1.0, "alpha out of range");
  require(vocab_size >= 1, "vocabulary size must be at least 1");
  require(num_bins >= 1, "number of bins must be at least 1");
  require_binary(covered);

  CoverageReport report;
  report.bins.resize(num_bins);
  std::vector<std::size_t> hits(num_bins, 0);
  std::size_t total_hits = 0;
  std::size_t total_size = 0;
  for (std::size_t i = 0; i < set_sizes.size(); ++i) {
    const std::size_t size = set_sizes[i];
    require(size <= vocab_size, "prediction set larger than the vocabulary");
    const std::size_t bin = std::min(size * num_bins / vocab_size, num_bins - 1);
    ++report.bins[bin].count;
    hits[bin] += static_cast<std::size_t>(covered[i]);
    total_hits += static_cast<std::size_t>(covered[i]);
    total_size += size;
  }
  const auto n = static_cast<double>(set_sizes.size());
  report.coverage = static_cast<double>(total_hits) / n;
  report.width = static_cast<double>(total_size) / n / static_cast<double>(vocab_size);
  report.ssc = 1.0;
  for (std::size_t b = 0; b < num_bins; ++b) {
    auto& bin = report.bins[b];
    if (bin.count == 0) continue;
    const auto count = static_cast<double>(bin.count);
    bin.coverage = static_cast<double>(hits[b]) / count;
    report.ssc = std::min(report.ssc, bin.coverage);
    report.ecg += count / n * std::max(1.0 - alpha - bin.coverage, 0.0);
  }
  return report;
}

CoverageReport coverage_report(std::span<const PredictionSet> sets,
                               std::span<const std::size_t> labels, double alpha,
                               std::size_t vocab_size, std::size_t num_bins) {
  require(sets.size() == labels.size(), "sets and labels differ in length");
  std::vector<std::size_t> sizes;
  std::vector<int> covered;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    sizes.push_back(sets[i].size());
    covered.push_back(sets[i].contains(labels[i]) ? 1 : 0);
  }
  return coverage_report(sizes, covered, alpha, vocab_size, num_bins);
}

double brier(std::span<const double> confidences, std::span<const int> correct) {
  require(!confidences.empty(), "empty input");
  require(confidences.size() == correct.size(), "confidences and correctness differ in length");
  require_binary(correct);
  double total = 0.0;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    require(confidences[i] >= 0.0 && confidences[i] <= 1.0, "confidences must lie in [0, 1]");
    const double d = confidences[i] - correct[i];
    total += d * d;
  }
  return total / static_cast<double>(confidences.size());
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), "scores and labels differ in length");
  require_binary(labels);
  const std::size_t n = scores.size();
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  require(positives > 0 && positives < n, "AUROC undefined for single-class labels",
          ErrorCode::kData);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) positive_rank_sum += mid_rank;
    }
    i = j + 1;
  }
  const auto p = static_cast<double>(positives);
  const auto q = static_cast<double>(n - positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double aupr(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), "scores and labels differ in length");
  require_binary(labels);
  const std::size_t n = scores.size();
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  require(positives > 0 && positives < n, "AUPR undefined for single-class labels",
          ErrorCode::kData);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double area = 0.0;
  double previous_recall = 0.0;
  std::size_t true_positives = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) true_positives += static_cast<std::size_t>(labels[order[k]]);
    const double recall = static_cast<double>(true_positives) / static_cast<double>(positives);
    const double precision = static_cast<double>(true_positives) / static_cast<double>(j + 1);
    area += (recall - previous_recall) * precision;
    previous_recall = recall;
    i = j + 1;
  }
  return area;
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "inputs differ in length");
  require(x.size() >= 2, "kendall tau needs at least two observations");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(std::isfinite(x[i]) && std::isfinite(y[i]), "inputs must be finite");
  }
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t x_ties =
      tied_pairs(n, [&](std::size_t i, std::size_t j) { return x[order[i]] == x[order[j]]; });
  const std::int64_t joint_ties = tied_pairs(n, [&](std::size_t i, std::size_t j) {
    return x[order[i]] == x[order[j]] && y[order[i]] == y[order[j]];
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const std::int64_t swaps = count_inversions(ys);
  const std::int64_t y_ties = tied_pairs(n, [&](std::size_t i, std::size_t j) { return ys[i] == ys[j]; });

  const double denominator =
      std::sqrt(static_cast<double>(total - x_ties) * static_cast<double>(total - y_ties));
  require(denominator > 0.0, "kendall tau undefined for constant input", ErrorCode::kData);
  const std::int64_t concordant_minus_discordant = total - x_ties - y_ties + joint_ties - 2 * swaps;
  return static_cast<double>(concordant_minus_discordant) / denominator;
}

double max_prob(const ProbVector& p) {
  return *std::max_element(p.probs().begin(), p.probs().end());
}

double max_prob_uncertainty(const ProbVector& p) { return 1.0 - max_prob(p); }

double predictive_entropy(const ProbVector& p) { return entropy_of(p.probs()); }

double softmax_gap(const ProbVector& p) {
  double first = -1.0;
  double second = -1.0;
  for (double x : p.probs()) {
    if (x > first) {
      second = first;
      first = x;
    } else if (x > second) {
      second = x;
    }
  }
  return first - second;
}

double dempster_shafer(std::span<const double> logits) {
  require(logits.size() >= 2, "dempster-shafer needs at least two classes");
  const double top = *std::max_element(logits.begin(), logits.end());
  require(std::isfinite(top), "logits must be finite");
  double sum = 0.0;
  for (double z : logits) {
    require(std::isfinite(z), "logits must be finite");
    sum += std::exp(z - top);
  }
  const double log_ratio = top + std::log(sum) - std::log(static_cast<double>(logits.size()));
  return 1.0 / (1.0 + std::exp(log_ratio));
}

double variation_ratio(std::span<const std::size_t> predicted) {
  require(!predicted.empty(), "no predictions");
  std::vector<std::size_t> sorted(predicted.begin(), predicted.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t best = 0;
  std::size_t run = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    run = (i > 0 && sorted[i] == sorted[i - 1]) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return 1.0 - static_cast<double>(best) / static_cast<double>(sorted.size());
}

double variation_ratio(std::span<const ProbVector> rows) {
  require_rows(rows);
  std::vector<std::size_t> predicted;
  for (const auto& row : rows) predicted.push_back(argmax(row.probs()));
  return variation_ratio(predicted);
}

double class_variance(std::span<const ProbVector> rows) {
  require_rows(rows);
  const std::size_t k = rows.front().size();
  const auto b = static_cast<double>(rows.size());
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    // Shifted by the first row so identical rows give exactly 0.
    const double shift = rows.front()[c];
    double mean = 0.0;
    for (const auto& row : rows) mean += row[c] - shift;
    mean /= b;
    double variance = 0.0;
    for (const auto& row : rows) variance += (row[c] - shift - mean) * (row[c] - shift - mean);
    total += variance / b;
  }
  return total / static_cast<double>(k);
}

double bma_mutual_information(std::span<const ProbVector> rows) {
  require_rows(rows);
  const std::size_t k = rows.front().size();
  const auto b = static_cast<double>(rows.size());
  std::vector<double> mean(k, 0.0);
  double expected_entropy = 0.0;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < k; ++c) mean[c] += row[c] / b;
    expected_entropy += entropy_of(row.probs()) / b;
  }
  return std::max(0.0, entropy_of(mean) - expected_entropy);
}

std::string_view to_string(Aggregation aggregation) {
  return aggregation == Aggregation::kMean ? "mean" : "max";
}

std::optional<Aggregation> parse_aggregation(std::string_view name) {
  if (name == "mean") return Aggregation::kMean;
  if (name == "max") return Aggregation::kMax;
  return std::nullopt;
}

double aggregate(std::span<const double> stepwise, Aggregation aggregation) {
  require(!stepwise.empty(), "no step-wise values to aggregate");
  if (aggregation == Aggregation::kMax) return *std::max_element(stepwise.begin(), stepwise.end());
  return std::accumulate(stepwise.begin(), stepwise.end(), 0.0) / static_cast<double>(stepwise.size());
}

}  // namespace uqkit
