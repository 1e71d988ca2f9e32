#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uqkit/conformal.hpp"
#include "uqkit/datastore.hpp"
#include "uqkit/rng.hpp"

namespace uqkit {

struct SynthOptions {
  double temperature = 2.0;
  double latent_noise = 0.5;  // std of the per-step latent innovation
  double mixing_gain = 1.5;   // mixing entries ~ N(0, gain^2 / d)
  std::size_t burn_in = 50;
};

/// Toy sequence model: latent z_{t+1} = tanh(M z_t) + noise, token
/// distribution softmax(E z / temperature).
struct SynthModel {
  std::size_t vocab_size = 0;
  std::size_t latent_dim = 0;
  std::vector<double> emission;  // vocab_size x latent_dim, row-major
  std::vector<double> mixing;    // latent_dim x latent_dim, row-major
  double latent_noise = 0.0;
  double temperature = 1.0;
  std::size_t burn_in = 0;
};

struct StepTriple {
  std::vector<double> latent;
  ProbVector probs;
  std::size_t gold = 0;
};

/// Emission entries ~ N(0, 1); deterministic given the seed.
SynthModel new_model(std::size_t vocab_size, std::size_t latent_dim, std::uint64_t seed,
                     const SynthOptions& options = {});

ProbVector token_distribution(const SynthModel& model, std::span<const double> latent);

/// Draws a class id from p by inverse transform.
std::size_t sample_token(const ProbVector& p, Rng& rng);

/// Runs the latent recurrence from zero through `burn_in` discarded steps,
/// then records `num_steps` triples with gold tokens drawn from the emitted
/// distribution.
std::vector<StepTriple> generate(const SynthModel& model, std::size_t num_steps, Rng& rng);

/// Triple at a fixed latent (no recurrence).
StepTriple step_at(const SynthModel& model, std::span<const double> latent, Rng& rng);

/// latent + N(0, sigma^2) per coordinate.
std::vector<double> inject_noise(std::span<const double> latent, double sigma, Rng& rng);

/// Datastore of (latent, nonconformity(probs, gold)) over `num_steps`
/// generated steps.
Datastore build_calibration_store(const SynthModel& model, std::size_t num_steps, ScoreKind score,
                                  Rng& rng);

/// Same, from existing triples.
Datastore build_calibration_store(std::span<const StepTriple> steps, ScoreKind score);

}  // namespace uqkit
