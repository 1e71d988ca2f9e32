#include "uqkit/synthetic_lm.hpp"

#include <cmath>

#include "uqkit/error.hpp"

namespace uqkit {

SynthModel new_model(std::size_t vocab_size, std::size_t latent_dim, std::uint64_t seed,
                     const SynthOptions& options) {
  require(vocab_size >= 2, "vocabulary size must be at least 2");
  require(latent_dim >= 2, "latent dimension must be at least 2");
  require(options.temperature > 0.0, "temperature must be positive");
  require(options.latent_noise >= 0.0, "latent noise must be non-negative");
  require(options.mixing_gain >= 0.0, "mixing gain must be non-negative");

  Rng rng(seed);
  SynthModel model;
  model.vocab_size = vocab_size;
  model.latent_dim = latent_dim;
  model.emission.resize(vocab_size * latent_dim);
  for (auto& x : model.emission) x = rng.normal();
  const double mixing_std = options.mixing_gain / std::sqrt(static_cast<double>(latent_dim));
  model.mixing.resize(latent_dim * latent_dim);
  for (auto& x : model.mixing) x = rng.normal(0.0, mixing_std);
  model.latent_noise = options.latent_noise;
  model.temperature = options.temperature;
  model.burn_in = options.burn_in;
  return model;
}

ProbVector token_distribution(const SynthModel& model, std::span<const double> latent) {
  require(latent.size() == model.latent_dim, "latent dimension does not match model");
  std::vector<double> logits(model.vocab_size, 0.0);
  for (std::size_t v = 0; v < model.vocab_size; ++v) {
    const double* row = model.emission.data() + v * model.latent_dim;
    for (std::size_t j = 0; j < model.latent_dim; ++j) logits[v] += row[j] * latent[j];
  }
  return ProbVector::softmax(logits, model.temperature);
}

std::size_t sample_token(const ProbVector& p, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    cumulative += p[k];
    if (u < cumulative) return k;
  }
  // Rounding left u above the total; fall back to the last class with mass.
  for (std::size_t k = p.size(); k-- > 0;) {
    if (p[k] > 0.0) return k;
  }
  return p.size() - 1;
}

std::vector<StepTriple> generate(const SynthModel& model, std::size_t num_steps, Rng& rng) {
  const std::size_t d = model.latent_dim;
  std::vector<double> z(d, 0.0);
  std::vector<double> next(d);
  auto advance = [&] {
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += model.mixing[i * d + j] * z[j];
      next[i] = std::tanh(acc) + model.latent_noise * rng.normal();
    }
    z.swap(next);
  };
  for (std::size_t t = 0; t < model.burn_in; ++t) advance();

  std::vector<StepTriple> steps;
  steps.reserve(num_steps);
  for (std::size_t t = 0; t < num_steps; ++t) {
    advance();
    steps.push_back(step_at(model, z, rng));
  }
  return steps;
}

StepTriple step_at(const SynthModel& model, std::span<const double> latent, Rng& rng) {
  ProbVector probs = token_distribution(model, latent);
  const std::size_t gold = sample_token(probs, rng);
  return {std::vector<double>(latent.begin(), latent.end()), std::move(probs), gold};
}

std::vector<double> inject_noise(std::span<const double> latent, double sigma, Rng& rng) {
  require(sigma >= 0.0 && std::isfinite(sigma), "noise level must be non-negative");
  std::vector<double> noisy(latent.begin(), latent.end());
  if (sigma == 0.0) return noisy;
  for (auto& x : noisy) x += sigma * rng.normal();
  return noisy;
}

Datastore build_calibration_store(std::span<const StepTriple> steps, ScoreKind score) {
  require(!steps.empty(), "no calibration steps");
  Datastore store(steps.front().latent.size());
  for (const auto& step : steps) store.add(step.latent, nonconformity(score, step.probs, step.gold));
  return store;
}

Datastore build_calibration_store(const SynthModel& model, std::size_t num_steps, ScoreKind score,
                                  Rng& rng) {
  require(num_steps >= 1, "number of calibration steps must be at least 1");
  const auto steps = generate(model, num_steps, rng);
  return build_calibration_store(steps, score);
}

}  // namespace uqkit
