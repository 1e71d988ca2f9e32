#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqkit/datastore.hpp"
#include "uqkit/rng.hpp"

namespace uqkit {

/// Categorical distribution over V >= 2 classes summing to 1 within 1e-9.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> probs);

  /// softmax(logits / temperature), computed with the max subtracted.
  static ProbVector softmax(std::span<const double> logits, double temperature = 1.0);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// Class ids by descending probability, ties by ascending id.
  std::vector<std::size_t> descending_order() const;

 private:
  std::vector<double> probs_;
};

/// Conformal quantile, or the FULL sentinel when calibration mass cannot
/// reach the target level.
class QHat {
 public:
  static QHat full() { return QHat(); }
  static QHat of(double value);

  bool is_full() const { return !value_.has_value(); }
  /// Requires !is_full().
  double value() const;
  /// "FULL" or the shortest round-tripping decimal.
  std::string to_string() const;

  friend bool operator==(const QHat&, const QHat&) = default;

 private:
  QHat() = default;
  std::optional<double> value_;
};

struct PredictionSet {
  std::vector<std::size_t> indices;  // descending probability
  QHat q_hat = QHat::full();

  bool contains(std::size_t label) const;
  std::size_t size() const { return indices.size(); }
};

enum class ScoreKind { kSimple, kAdaptive };

std::string_view to_string(ScoreKind kind);
std::optional<ScoreKind> parse_score_kind(std::string_view name);

/// 1 - p[label].
double score_simple(const ProbVector& p, std::size_t label);

/// Probability mass of all classes ranked at or above `label`.
double score_adaptive(const ProbVector& p, std::size_t label);

double nonconformity(ScoreKind kind, const ProbVector& p, std::size_t label);

/// ceil((N + 1)(1 - alpha))-th smallest score, FULL when that exceeds N.
/// Capped at 1.
QHat split_quantile(std::span<const double> scores, double alpha);

struct WeightedCalibration {
  WeightedCalibration(std::vector<double> scores, std::vector<double> weights);

  std::vector<double> scores;
  std::vector<double> weights;
};

/// Smallest score whose cumulative normalised weight w_i / (1 + sum w)
/// reaches 1 - alpha; FULL when the total normalised mass falls short.
/// Capped at 1. With unit weights this is split_quantile exactly: the
/// comparison is made on raw weights against (1 - alpha)(1 + sum w).
QHat weighted_quantile(const WeightedCalibration& calibration, double alpha);

/// exp(-d / tau) for kL2 (d a squared distance), exp(s / tau) for the
/// similarity metrics. Exponents are clamped to [-700, 700].
std::vector<double> rbf_weights(std::span<const double> keys, double tau, Metric metric);

/// Top-c classes with c = #{c' : cumulative mass of the top c' < q_hat} + 1,
/// capped at V. FULL yields every class.
PredictionSet build_set_adaptive(const ProbVector& p, const QHat& q_hat);

/// {k : p_k >= 1 - q_hat}, possibly empty.
PredictionSet build_set_threshold(const ProbVector& p, const QHat& q_hat);

struct GenerateOptions {
  double alpha = 0.1;
  std::size_t k = 100;
  double tau = 1.0;
  Metric metric = Metric::kL2;
  std::size_t nprobe = 0;  // 0 = exact search; otherwise requires an IVF index
};

/// One non-exchangeable conformal step: retrieve neighbours of `latent`,
/// weight them with rbf_weights, take the weighted quantile of their scores
/// and build the adaptive set. k larger than the store is truncated with a
/// warning.
PredictionSet conformal_generate_step(const Datastore& store, std::span<const double> latent,
                                      const ProbVector& p, const GenerateOptions& options);

struct TemperatureSearchOptions {
  double alpha = 0.1;
  double tau_min = 0.0;
  double tau_max = 1.0;
  double eta = 0.1;
  std::size_t steps = 20;
};

struct TemperatureSearchResult {
  double tau = 0.0;
  double coverage = 0.0;
  std::vector<double> visited;
};

/// Stochastic hill climbing on tau: tau_{t+1} = tau_t + eta * e * sign(1 -
/// alpha - cov(tau_t)) with e ~ N(0, (tau_max - tau_min)^2), clamped into
/// the bounds. Returns the visited tau whose coverage is closest to
/// 1 - alpha (earliest on ties); stops early on an exact hit.
TemperatureSearchResult temperature_search(const std::function<double(double)>& coverage_eval,
                                           const TemperatureSearchOptions& options, Rng& rng);

}  // namespace uqkit
