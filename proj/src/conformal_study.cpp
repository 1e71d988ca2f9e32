#include "uqkit/conformal_study.hpp"

#include <algorithm>
#include <cmath>

#include "uqkit/error.hpp"
#include "uqkit/log.hpp"
#include "uqkit/parallel.hpp"

namespace uqkit {
namespace {

enum StreamId : std::uint64_t { kModel, kCalibration, kTest, kNoise, kSearch, kHeldOut };

struct Evaluation {
  CoverageReport report;
  double mean_set_size = 0.0;
  double full_fraction = 0.0;
};

std::vector<double> latent_of(const Datastore& store, std::size_t i) {
  const auto x = store.latent(i);
  return {x.begin(), x.end()};
}

// Evaluates `make_set` on every step and summarises coverage.
template <class MakeSet>
Evaluation evaluate(std::size_t steps, const std::vector<std::size_t>& gold, double alpha,
                    std::size_t vocab_size, std::size_t bins, unsigned workers, MakeSet make_set) {
  std::vector<std::size_t> sizes(steps);
  std::vector<int> covered(steps);
  std::vector<int> full(steps);
  parallel_for(steps, workers, [&](std::size_t t) {
    const PredictionSet set = make_set(t);
    sizes[t] = set.size();
    covered[t] = set.contains(gold[t]) ? 1 : 0;
    full[t] = set.q_hat.is_full() ? 1 : 0;
  });
  Evaluation e;
  e.report = coverage_report(sizes, covered, alpha, vocab_size, bins);
  double size_total = 0.0;
  double full_total = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    size_total += static_cast<double>(sizes[t]);
    full_total += full[t];
  }
  e.mean_set_size = size_total / static_cast<double>(steps);
  e.full_fraction = full_total / static_cast<double>(steps);
  return e;
}

ConditionRecord make_record(std::string method, std::string metric, double tau,
                            const ConformalStudyConfig& config, double noise, const Evaluation& e) {
  ConditionRecord r;
  r.method = std::move(method);
  r.metric = std::move(metric);
  r.tau = tau;
  r.alpha = config.alpha;
  r.noise = noise;
  r.coverage = e.report.coverage;
  r.width = e.report.width;
  r.ssc = e.report.ssc;
  r.ecg = e.report.ecg;
  r.mean_set_size = e.mean_set_size;
  r.full_fraction = e.full_fraction;
  r.seed = config.seed;
  return r;
}

}  // namespace

double auto_tau(const Datastore& store, Metric metric) {
  require(store.size() >= 2, "auto tau needs at least two calibration records", ErrorCode::kData);
  std::vector<double> best(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto neighbors = store.query(latent_of(store, i), 2, metric);
    const Neighbor& other = neighbors[0].index != i ? neighbors[0] : neighbors[1];
    best[i] = std::fabs(other.key);
  }
  const auto middle = best.begin() + static_cast<std::ptrdiff_t>(best.size() / 2);
  std::nth_element(best.begin(), middle, best.end());
  return *middle > 0.0 ? *middle : 1.0;
}

double latent_std(const Datastore& store) {
  require(!store.empty(), "datastore is empty", ErrorCode::kData);
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    for (float x : store.latent(i)) {
      sum += x;
      count += 1.0;
    }
  }
  const double mean = sum / count;
  double squares = 0.0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    for (float x : store.latent(i)) squares += (x - mean) * (x - mean);
  }
  return std::sqrt(squares / count);
}

ConformalStudyResult run_conformal_study(const ConformalStudyConfig& config) {
  require(config.alpha > 0.0 && config.alpha < 1.0, "alpha out of range");
  require(config.calibration_steps >= 2, "calibration needs at least two steps");
  require(config.test_steps >= 1, "test needs at least one step");
  require(config.k >= 1, "k must be at least 1");
  require(!config.noise_levels.empty(), "at least one noise level is required");
  for (double f : config.noise_levels) require(f >= 0.0 && std::isfinite(f), "noise levels must be non-negative");
  if (config.tau) require(*config.tau > 0.0, "tau must be positive");

  const SynthModel model =
      new_model(config.vocab_size, config.latent_dim, derive_seed(config.seed, kModel), config.model);
  const Datastore store = [&] {
    if (!config.store_path.empty()) {
      Datastore loaded = Datastore::load(config.store_path);
      require(loaded.dim() == config.latent_dim, "datastore dimension mismatch", ErrorCode::kData);
      require(loaded.size() >= 2, "calibration store needs at least two records", ErrorCode::kData);
      return loaded;
    }
    Rng calibration_rng(derive_seed(config.seed, kCalibration));
    const auto calibration = generate(model, config.calibration_steps, calibration_rng);
    return build_calibration_store(calibration, config.score);
  }();
  if (!config.save_store_path.empty()) store.save(config.save_store_path);

  Rng test_rng(derive_seed(config.seed, kTest));
  const auto test = generate(model, config.test_steps, test_rng);
  std::vector<std::size_t> gold;
  for (const auto& step : test) gold.push_back(step.gold);

  Rng noise_rng(derive_seed(config.seed, kNoise));
  std::vector<std::vector<double>> directions(test.size());
  for (auto& xi : directions) xi = inject_noise(std::vector<double>(config.latent_dim, 0.0), 1.0, noise_rng);

  ConformalStudyResult result;
  result.latent_std = latent_std(store);
  const auto scores = store.scores();
  result.split_q_hat = split_quantile(scores, config.alpha);
  const QHat unit_q_hat = weighted_quantile(
      WeightedCalibration({scores.begin(), scores.end()}, std::vector<double>(scores.size(), 1.0)),
      config.alpha);
  result.unit_weights_match_split = unit_q_hat == result.split_q_hat;

  std::vector<double> levels = config.noise_levels;
  std::sort(levels.begin(), levels.end());

  // Noisy latents and their token distributions, shared by every method.
  std::vector<std::vector<std::vector<double>>> noisy(levels.size());
  std::vector<std::vector<ProbVector>> probs(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const double sigma = levels[l] * result.latent_std;
    noisy[l].resize(test.size());
    for (std::size_t t = 0; t < test.size(); ++t) {
      noisy[l][t] = test[t].latent;
      for (std::size_t j = 0; j < config.latent_dim; ++j) noisy[l][t][j] += sigma * directions[t][j];
      probs[l].push_back(token_distribution(model, noisy[l][t]));
    }
  }

  const unsigned workers = config.workers;
  std::size_t k = config.k;
  if (k > store.size()) {
    warn("k exceeds the calibration store size; using the whole store");
    k = store.size();
  }
  if (config.include_split) {
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const Evaluation e = evaluate(test.size(), gold, config.alpha, config.vocab_size,
                                    config.num_size_bins, workers, [&](std::size_t t) {
                                      return build_set_adaptive(probs[l][t], result.split_q_hat);
                                    });
      result.records.push_back(make_record("split", "none", 0.0, config, levels[l], e));
    }
  }

  for (Metric metric : config.metrics) {
    double tau = config.tau ? *config.tau : auto_tau(store, metric);
    if (config.search) {
      Rng held_out_rng(derive_seed(config.seed, kHeldOut));
      const auto held_out = generate(model, config.search_steps, held_out_rng);
      std::vector<std::size_t> held_out_gold;
      for (const auto& step : held_out) held_out_gold.push_back(step.gold);
      TemperatureSearchOptions options = config.search_options;
      options.alpha = config.alpha;
      if (!config.search_bounds_set) {
        options.tau_min = tau / 4.0;
        options.tau_max = tau * 4.0;
      }
      auto coverage_at = [&](double candidate) {
        GenerateOptions generate_options{config.alpha, k, candidate, metric, 0};
        return evaluate(held_out.size(), held_out_gold, config.alpha, config.vocab_size,
                        config.num_size_bins, workers, [&](std::size_t t) {
                          return conformal_generate_step(store, held_out[t].latent,
                                                         held_out[t].probs, generate_options);
                        })
            .report.coverage;
      };
      Rng search_rng(derive_seed(config.seed, kSearch + 16 * static_cast<std::uint64_t>(metric)));
      tau = temperature_search(coverage_at, options, search_rng).tau;
    }

    const GenerateOptions generate_options{config.alpha, k, tau, metric, 0};
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const Evaluation e = evaluate(test.size(), gold, config.alpha, config.vocab_size,
                                    config.num_size_bins, workers, [&](std::size_t t) {
                                      return conformal_generate_step(store, noisy[l][t], probs[l][t],
                                                                     generate_options);
                                    });
      result.records.push_back(
          make_record("knn", std::string(to_string(metric)), tau, config, levels[l], e));
    }
  }
  return result;
}

}  // namespace uqkit
