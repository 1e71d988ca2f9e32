#include "uqkit/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "format.hpp"
#include "uqkit/error.hpp"
#include "uqkit/log.hpp"

namespace uqkit {
namespace {

void require_alpha(double alpha) { require(alpha > 0.0 && alpha < 1.0, "alpha out of range"); }

QHat capped(double value) { return QHat::of(std::min(value, 1.0)); }

// Calls visit(position, cumulative) along the descending order and stops
// when it returns false. Shared by the adaptive score and set so both see
// identical cumulative sums.
template <class Visit>
void walk_cumulative(const ProbVector& p, const std::vector<std::size_t>& order, Visit visit) {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    cumulative += p[order[i]];
    if (!visit(i, cumulative)) return;
  }
}

}  // namespace

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  require(probs_.size() >= 2, "probability vector needs at least two classes");
  double total = 0.0;
  for (double x : probs_) {
    require(std::isfinite(x) && x >= 0.0 && x <= 1.0, "probabilities must lie in [0, 1]");
    total += x;
  }
  require(std::fabs(total - 1.0) <= 1e-9, "probabilities must sum to 1");
}

ProbVector ProbVector::softmax(std::span<const double> logits, double temperature) {
  require(temperature > 0.0, "softmax temperature must be positive");
  require(logits.size() >= 2, "probability vector needs at least two classes");
  const double top = *std::max_element(logits.begin(), logits.end());
  require(std::isfinite(top), "logits must be finite");
  std::vector<double> probs(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    require(std::isfinite(logits[i]), "logits must be finite");
    probs[i] = std::exp((logits[i] - top) / temperature);
    total += probs[i];
  }
  for (auto& x : probs) x /= total;
  return ProbVector(std::move(probs));
}

std::vector<std::size_t> ProbVector::descending_order() const {
  std::vector<std::size_t> order(probs_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [this](std::size_t a, std::size_t b) { return probs_[a] > probs_[b]; });
  return order;
}

QHat QHat::of(double value) {
  require(std::isfinite(value), "quantile must be finite");
  QHat q;
  q.value_ = value;
  return q;
}

double QHat::value() const {
  require(value_.has_value(), "quantile is FULL");
  return *value_;
}

std::string QHat::to_string() const {
  return value_ ? detail::format_double(*value_) : std::string("FULL");
}

bool PredictionSet::contains(std::size_t label) const {
  return std::find(indices.begin(), indices.end(), label) != indices.end();
}

std::string_view to_string(ScoreKind kind) {
  return kind == ScoreKind::kSimple ? "simple" : "adaptive";
}

std::optional<ScoreKind> parse_score_kind(std::string_view name) {
  if (name == "simple") return ScoreKind::kSimple;
  if (name == "adaptive") return ScoreKind::kAdaptive;
  return std::nullopt;
}

double score_simple(const ProbVector& p, std::size_t label) {
  require(label < p.size(), "label out of range");
  return 1.0 - p[label];
}

double score_adaptive(const ProbVector& p, std::size_t label) {
  require(label < p.size(), "label out of range");
  double score = 1.0;
  const auto order = p.descending_order();
  walk_cumulative(p, order, [&](std::size_t i, double cumulative) {
    if (order[i] != label) return true;
    score = cumulative;
    return false;
  });
  return std::min(score, 1.0);
}

double nonconformity(ScoreKind kind, const ProbVector& p, std::size_t label) {
  return kind == ScoreKind::kSimple ? score_simple(p, label) : score_adaptive(p, label);
}

QHat split_quantile(std::span<const double> scores, double alpha) {
  require(!scores.empty(), "empty calibration scores");
  require_alpha(alpha);
  const auto n = static_cast<double>(scores.size());
  const double index = std::ceil((1.0 - alpha) * (1.0 + n));
  if (index > n) return QHat::full();
  std::vector<double> sorted(scores.begin(), scores.end());
  const auto k = static_cast<std::size_t>(std::max(index, 1.0)) - 1;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  return capped(sorted[k]);
}

WeightedCalibration::WeightedCalibration(std::vector<double> s, std::vector<double> w)
    : scores(std::move(s)), weights(std::move(w)) {
  require(scores.size() == weights.size(), "scores and weights differ in length");
  for (double x : scores) require(std::isfinite(x), "calibration scores must be finite");
  for (double x : weights) require(std::isfinite(x) && x >= 0.0, "weights must be finite and non-negative");
}

QHat weighted_quantile(const WeightedCalibration& calibration, double alpha) {
  require_alpha(alpha);
  const auto& scores = calibration.scores;
  const auto& weights = calibration.weights;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double total = 0.0;
  for (std::size_t i : order) total += weights[i];
  const double level = (1.0 - alpha) * (1.0 + total);
  double cumulative = 0.0;
  for (std::size_t i : order) {
    cumulative += weights[i];
    if (cumulative >= level) return capped(scores[i]);
  }
  return QHat::full();
}

std::vector<double> rbf_weights(std::span<const double> keys, double tau, Metric metric) {
  require(tau > 0.0 && std::isfinite(tau), "tau must be positive");
  std::vector<double> weights(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const double exponent = metric == Metric::kL2 ? -keys[i] / tau : keys[i] / tau;
    weights[i] = std::exp(std::clamp(exponent, -700.0, 700.0));
  }
  return weights;
}

PredictionSet build_set_adaptive(const ProbVector& p, const QHat& q_hat) {
  PredictionSet set;
  set.q_hat = q_hat;
  set.indices = p.descending_order();
  if (q_hat.is_full()) return set;
  const double q = q_hat.value();
  std::size_t below = 0;
  walk_cumulative(p, set.indices, [&](std::size_t, double cumulative) {
    if (cumulative >= q) return false;
    ++below;
    return true;
  });
  set.indices.resize(std::min(below + 1, p.size()));
  return set;
}

PredictionSet build_set_threshold(const ProbVector& p, const QHat& q_hat) {
  PredictionSet set;
  set.q_hat = q_hat;
  set.indices = p.descending_order();
  if (q_hat.is_full()) return set;
  const double cutoff = 1.0 - q_hat.value();
  std::erase_if(set.indices, [&](std::size_t k) { return p[k] < cutoff; });
  return set;
}

PredictionSet conformal_generate_step(const Datastore& store, std::span<const double> latent,
                                      const ProbVector& p, const GenerateOptions& options) {
  require(!store.empty(), "datastore is empty", ErrorCode::kData);
  require(options.k >= 1, "k must be at least 1");
  std::size_t k = options.k;
  if (k > store.size()) {
    warn("k = " + std::to_string(k) + " exceeds datastore size " + std::to_string(store.size()) +
         "; using the whole store");
    k = store.size();
  }
  const auto neighbors = options.nprobe == 0
                             ? store.query(latent, k, options.metric)
                             : store.query_ivf(latent, k, options.metric, options.nprobe);
  std::vector<double> keys;
  std::vector<double> scores;
  for (const auto& n : neighbors) {
    keys.push_back(n.key);
    scores.push_back(n.score);
  }
  WeightedCalibration calibration(std::move(scores), rbf_weights(keys, options.tau, options.metric));
  return build_set_adaptive(p, weighted_quantile(calibration, options.alpha));
}

TemperatureSearchResult temperature_search(const std::function<double(double)>& coverage_eval,
                                           const TemperatureSearchOptions& options, Rng& rng) {
  require_alpha(options.alpha);
  require(options.tau_min < options.tau_max, "tau_min must be below tau_max");
  require(options.steps >= 1, "steps must be at least 1");
  const double target = 1.0 - options.alpha;
  const double spread = options.tau_max - options.tau_min;

  auto evaluate = [&](double tau) {
    const double coverage = coverage_eval(tau);
    require(std::isfinite(coverage), "coverage evaluation returned a non-finite value",
            ErrorCode::kData);
    return coverage;
  };

  TemperatureSearchResult result;
  double tau = rng.uniform(options.tau_min, options.tau_max);
  double coverage = evaluate(tau);
  result.tau = tau;
  result.coverage = coverage;
  result.visited.push_back(tau);
  double best_gap = std::fabs(coverage - target);

  for (std::size_t step = 0; step < options.steps && best_gap > 0.0; ++step) {
    const double direction = target > coverage ? 1.0 : (target < coverage ? -1.0 : 0.0);
    tau = std::clamp(tau + options.eta * rng.normal(0.0, spread) * direction, options.tau_min,
                     options.tau_max);
    coverage = evaluate(tau);
    result.visited.push_back(tau);
    const double gap = std::fabs(coverage - target);
    if (gap < best_gap) {
      best_gap = gap;
      result.tau = tau;
      result.coverage = coverage;
    }
  }
  return result;
}

}  // namespace uqkit
