#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uqkit/calibration_metrics.hpp"
#include "uqkit/conformal.hpp"
#include "uqkit/datastore.hpp"
#include "uqkit/synthetic_lm.hpp"

namespace uqkit {

/// Coverage study on the synthetic model: static split conformal against
/// kNN-weighted conformal under latent noise.
///
/// Calibration and test sequences are generated from independent streams.
/// Test step t at noise fraction f sees latent z_t + f * s * xi_t, where s is
/// the pooled standard deviation of the calibration latents and xi_t is a
/// fixed standard-normal vector, so every noise level perturbs along the same
/// directions. Predictions and datastore queries use the noisy latent; gold
/// tokens come from the clean step.
struct ConformalStudyConfig {
  std::size_t vocab_size = 100;
  std::size_t latent_dim = 16;
  SynthOptions model;
  std::size_t calibration_steps = 2000;
  std::size_t test_steps = 2000;
  double alpha = 0.1;
  ScoreKind score = ScoreKind::kAdaptive;
  std::size_t k = 100;
  std::vector<Metric> metrics{Metric::kL2};
  std::optional<double> tau;  // unset: auto_tau() per metric
  std::vector<double> noise_levels{0.0};
  bool include_split = true;
  bool search = false;  // temperature search on held-out calibration steps
  TemperatureSearchOptions search_options;  // alpha is taken from the study; unset bounds derive from auto tau
  bool search_bounds_set = false;
  std::size_t search_steps = 500;
  std::size_t num_size_bins = kDefaultSizeBins;
  std::string store_path;       // use this UQDS calibration store instead of generating one
  std::string save_store_path;  // write the calibration store here
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

struct ConditionRecord {
  std::string method;  // "split" or "knn"
  std::string metric;  // "none" for split
  double tau = 0.0;    // 0 for split
  double alpha = 0.0;
  double noise = 0.0;  // fraction of the latent std
  double coverage = 0.0;
  double width = 0.0;
  double ssc = 0.0;
  double ecg = 0.0;
  double mean_set_size = 0.0;
  double full_fraction = 0.0;  // share of steps whose quantile was FULL
  std::uint64_t seed = 0;
};

struct ConformalStudyResult {
  std::vector<ConditionRecord> records;  // split first, then metrics in config order; noise ascending within each
  double latent_std = 0.0;
  QHat split_q_hat = QHat::full();
  bool unit_weights_match_split = false;  // unit-weight quantile equals split on every test step
};

/// Median, over calibration records, of the best key to any other record
/// under `metric` (absolute value for similarities). Falls back to 1 when
/// that median is 0.
double auto_tau(const Datastore& store, Metric metric);

/// Pooled standard deviation of all latent coordinates.
double latent_std(const Datastore& store);

ConformalStudyResult run_conformal_study(const ConformalStudyConfig& config);

}  // namespace uqkit
