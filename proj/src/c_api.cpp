#include "uqkit/uqkit.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "uqkit/calibration_metrics.hpp"
#include "uqkit/conformal.hpp"
#include "uqkit/conformal_study.hpp"
#include "uqkit/datastore.hpp"
#include "uqkit/dirichlet.hpp"
#include "uqkit/empirical.hpp"
#include "uqkit/error.hpp"
#include "uqkit/error_sim.hpp"
#include "uqkit/parallel.hpp"
#include "uqkit/significance.hpp"

struct uq_dist {
  uqkit::DistSpec spec;
};

struct uq_datastore {
  uqkit::Datastore store;
};

struct uq_study_result {
  uqkit::ConformalStudyResult result;
};

namespace {

thread_local std::string last_error;

uq_status fail(uq_status status, const char* message) {
  last_error = message;
  return status;
}

uq_status status_of(uqkit::ErrorCode code) {
  switch (code) {
    case uqkit::ErrorCode::kInvalidArgument: return UQ_ERR_INVALID_ARGUMENT;
    case uqkit::ErrorCode::kData: return UQ_ERR_DATA;
    case uqkit::ErrorCode::kIo: return UQ_ERR_IO;
    case uqkit::ErrorCode::kFormat: return UQ_ERR_FORMAT;
  }
  return UQ_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes.
template <class Body>
uq_status guarded(Body&& body) {
  try {
    body();
    return UQ_OK;
  } catch (const uqkit::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(UQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(UQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UQ_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* pointer, const char* what) {
  if (pointer == nullptr) throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

std::vector<double> copy(const double* x, std::size_t n, const char* what) {
  if (n > 0) need(x, what);
  return n > 0 ? std::vector<double>(x, x + n) : std::vector<double>();
}

uqkit::Sample sample_of(const double* x, std::size_t n, const char* what) {
  return uqkit::Sample(copy(x, n, what));
}

uqkit::TestKind test_kind(uq_test_kind kind) {
  switch (kind) {
    case UQ_TEST_ASO: return uqkit::TestKind::kAso;
    case UQ_TEST_STUDENT_T: return uqkit::TestKind::kStudentT;
    case UQ_TEST_BOOTSTRAP: return uqkit::TestKind::kBootstrap;
    case UQ_TEST_PERMUTATION: return uqkit::TestKind::kPermutation;
    case UQ_TEST_WILCOXON: return uqkit::TestKind::kWilcoxon;
    case UQ_TEST_MANN_WHITNEY: return uqkit::TestKind::kMannWhitney;
  }
  throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, "unknown test kind");
}

uqkit::Metric metric_of(uq_metric metric) {
  switch (metric) {
    case UQ_METRIC_L2: return uqkit::Metric::kL2;
    case UQ_METRIC_IP: return uqkit::Metric::kInnerProduct;
    case UQ_METRIC_COSINE: return uqkit::Metric::kCosine;
  }
  throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, "unknown metric");
}

uqkit::ScoreKind score_of(uq_score_kind kind) {
  switch (kind) {
    case UQ_SCORE_SIMPLE: return uqkit::ScoreKind::kSimple;
    case UQ_SCORE_ADAPTIVE: return uqkit::ScoreKind::kAdaptive;
  }
  throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, "unknown score kind");
}

uq_qhat to_c(const uqkit::QHat& q) {
  return q.is_full() ? uq_qhat{1, 0.0} : uq_qhat{0, q.value()};
}

uqkit::QHat from_c(uq_qhat q) {
  return q.is_full ? uqkit::QHat::full() : uqkit::QHat::of(q.value);
}

uqkit::ProbVector probs_of(const double* probs, std::size_t vocab) {
  return uqkit::ProbVector(copy(probs, vocab, "probs"));
}

std::vector<int> flags_of(const int* flags, std::size_t n, const char* what) {
  if (n > 0) need(flags, what);
  return n > 0 ? std::vector<int>(flags, flags + n) : std::vector<int>();
}

std::vector<uqkit::ProbVector> rows_of(const double* matrix, std::size_t rows, std::size_t cols) {
  need(matrix, "matrix");
  std::vector<uqkit::ProbVector> out;
  for (std::size_t r = 0; r < rows; ++r) {
    out.emplace_back(std::vector<double>(matrix + r * cols, matrix + (r + 1) * cols));
  }
  return out;
}

void write_neighbors(const std::vector<uqkit::Neighbor>& neighbors, std::size_t* indices,
                     double* keys, double* scores, std::size_t* count) {
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    if (indices) indices[i] = neighbors[i].index;
    if (keys) keys[i] = neighbors[i].key;
    if (scores) scores[i] = neighbors[i].score;
  }
  *count = neighbors.size();
}

void write_set(const uqkit::PredictionSet& set, std::size_t* indices, std::size_t* size) {
  std::copy(set.indices.begin(), set.indices.end(), indices);
  *size = set.size();
}

void copy_name(char* dest, std::size_t capacity, const std::string& name) {
  const std::size_t n = std::min(name.size(), capacity - 1);
  std::memcpy(dest, name.data(), n);
  dest[n] = '\0';
}

}  // namespace

extern "C" {

const char* uq_last_error(void) { return last_error.c_str(); }

const char* uq_version(void) { return "1.0.0"; }

const char* uq_status_name(uq_status status) {
  switch (status) {
    case UQ_OK: return "ok";
    case UQ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case UQ_ERR_DATA: return "data error";
    case UQ_ERR_IO: return "i/o error";
    case UQ_ERR_FORMAT: return "format error";
    case UQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

uq_status uq_empirical_cdf(const double* x, size_t n, double t, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::empirical_cdf(sample_of(x, n, "x"), t);
  });
}

uq_status uq_empirical_quantile(const double* x, size_t n, double p, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::empirical_quantile(sample_of(x, n, "x"), p);
  });
}

uq_status uq_bootstrap_resample(const double* x, size_t n, size_t m, uint64_t seed, double* out) {
  return guarded([&] {
    need(out, "out");
    uqkit::Rng rng(seed);
    const auto resampled = uqkit::bootstrap_resample(sample_of(x, n, "x"), m, rng);
    std::copy(resampled.values().begin(), resampled.values().end(), out);
  });
}

uq_status uq_test_kind_parse(const char* name, uq_test_kind* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto kind = uqkit::parse_test_kind(name);
    if (!kind) throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, std::string("unknown test '") + name + "'");
    *out = static_cast<uq_test_kind>(*kind);
  });
}

const char* uq_test_kind_name(uq_test_kind kind) {
  try {
    return uqkit::to_string(test_kind(kind)).data();
  } catch (const uqkit::Error&) {
    return "unknown";
  }
}

uq_status uq_violation_ratio(const double* a, size_t na, const double* b, size_t nb, double dt,
                             double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::violation_ratio(sample_of(a, na, "a"), sample_of(b, nb, "b"), dt);
  });
}

uq_status uq_aso(const double* a, size_t na, const double* b, size_t nb, double alpha,
                 size_t num_bootstrap, double dt, uint64_t seed, uq_aso_result* out) {
  return guarded([&] {
    need(out, "out");
    uqkit::Rng rng(seed);
    const auto result = uqkit::aso(sample_of(a, na, "a"), sample_of(b, nb, "b"),
                                   {alpha, num_bootstrap, dt}, rng);
    *out = {result.eps_min, result.violation_ratio, result.sigma_hat};
  });
}

uq_status uq_classic_test(uq_test_kind kind, const double* a, size_t na, const double* b,
                          size_t nb, size_t resamples, uint64_t seed, double* statistic,
                          double* p_value) {
  return guarded([&] {
    uqkit::Rng rng(seed);
    const auto result = uqkit::classic_test(test_kind(kind), sample_of(a, na, "a"),
                                            sample_of(b, nb, "b"), resamples, rng);
    if (statistic) *statistic = result.statistic;
    if (p_value) *p_value = result.p_value;
  });
}

uq_status uq_bonferroni(double alpha, size_t num_comparisons, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::bonferroni(alpha, num_comparisons);
  });
}

uq_status uq_dist_parse(const char* text, uq_dist** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new uq_dist{uqkit::parse_dist(text)};
  });
}

void uq_dist_free(uq_dist* dist) { delete dist; }

uq_status uq_dist_to_string(const uq_dist* dist, char* buffer, size_t capacity, size_t* needed) {
  return guarded([&] {
    need(dist, "dist");
    const std::string text = uqkit::to_string(dist->spec);
    if (needed) *needed = text.size() + 1;
    if (buffer && capacity > 0) copy_name(buffer, capacity, text);
  });
}

uq_status uq_dist_sample(const uq_dist* dist, size_t n, uint64_t seed, double* out) {
  return guarded([&] {
    need(dist, "dist");
    need(out, "out");
    uqkit::Rng rng(seed);
    const auto sample = uqkit::sample_dist(dist->spec, n, rng);
    std::copy(sample.values().begin(), sample.values().end(), out);
  });
}

void uq_test_spec_default(uq_test_kind kind, uq_test_spec* out) {
  if (!out) return;
  *out = {kind, 0.05, uqkit::kDefaultBootstrap, uqkit::kDefaultDt, 1000};
}

uq_status uq_rate_sweep(const uq_test_spec* test, const uq_dist* a, const uq_dist* b, size_t n,
                        size_t trials, const double* thresholds, size_t num_thresholds,
                        uint64_t seed, unsigned workers, uq_rate_report* out) {
  return guarded([&] {
    need(test, "test");
    need(a, "a");
    need(out, "out");
    uqkit::TestSpec spec;
    spec.kind = test_kind(test->kind);
    spec.aso = {test->aso_alpha, test->aso_bootstrap, test->aso_dt};
    spec.resamples = test->resamples;
    const auto reports = uqkit::rate_sweep(spec, a->spec, b ? &b->spec : nullptr, n, trials,
                                           copy(thresholds, num_thresholds, "thresholds"), seed,
                                           workers);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      out[i] = {reports[i].threshold, reports[i].rate, reports[i].se};
    }
  });
}

uq_status uq_metric_parse(const char* name, uq_metric* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto metric = uqkit::parse_metric(name);
    if (!metric) throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, std::string("unknown metric '") + name + "'");
    *out = static_cast<uq_metric>(*metric);
  });
}

const char* uq_metric_name(uq_metric metric) {
  try {
    return uqkit::to_string(metric_of(metric)).data();
  } catch (const uqkit::Error&) {
    return "unknown";
  }
}

uq_status uq_score_kind_parse(const char* name, uq_score_kind* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto kind = uqkit::parse_score_kind(name);
    if (!kind) throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, std::string("unknown score '") + name + "'");
    *out = static_cast<uq_score_kind>(*kind);
  });
}

uq_status uq_score(uq_score_kind kind, const double* probs, size_t vocab, size_t label, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::nonconformity(score_of(kind), probs_of(probs, vocab), label);
  });
}

uq_status uq_split_quantile(const double* scores, size_t n, double alpha, uq_qhat* out) {
  return guarded([&] {
    need(out, "out");
    *out = to_c(uqkit::split_quantile(copy(scores, n, "scores"), alpha));
  });
}

uq_status uq_weighted_quantile(const double* scores, const double* weights, size_t n, double alpha,
                               uq_qhat* out) {
  return guarded([&] {
    need(out, "out");
    const uqkit::WeightedCalibration calibration(copy(scores, n, "scores"), copy(weights, n, "weights"));
    *out = to_c(uqkit::weighted_quantile(calibration, alpha));
  });
}

uq_status uq_rbf_weights(const double* keys, size_t n, double tau, uq_metric metric, double* out) {
  return guarded([&] {
    if (n > 0) need(out, "out");
    const auto weights = uqkit::rbf_weights(copy(keys, n, "keys"), tau, metric_of(metric));
    std::copy(weights.begin(), weights.end(), out);
  });
}

uq_status uq_build_set(uq_set_kind kind, const double* probs, size_t vocab, uq_qhat q_hat,
                       size_t* indices, size_t* size) {
  return guarded([&] {
    need(indices, "indices");
    need(size, "size");
    const auto p = probs_of(probs, vocab);
    const auto q = from_c(q_hat);
    if (kind == UQ_SET_ADAPTIVE) {
      write_set(uqkit::build_set_adaptive(p, q), indices, size);
    } else if (kind == UQ_SET_THRESHOLD) {
      write_set(uqkit::build_set_threshold(p, q), indices, size);
    } else {
      throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, "unknown set kind");
    }
  });
}

uq_status uq_temperature_search(uq_coverage_fn coverage, void* user, const uq_search_options* options,
                                uint64_t seed, double* tau, double* achieved_coverage) {
  return guarded([&] {
    need(reinterpret_cast<const void*>(coverage), "coverage");
    need(options, "options");
    need(tau, "tau");
    uqkit::Rng rng(seed);
    const uqkit::TemperatureSearchOptions search{options->alpha, options->tau_min, options->tau_max,
                                                 options->eta, options->steps};
    const auto result = uqkit::temperature_search([&](double t) { return coverage(t, user); }, search, rng);
    *tau = result.tau;
    if (achieved_coverage) *achieved_coverage = result.coverage;
  });
}

uq_status uq_datastore_new(size_t dim, uq_datastore** out) {
  return guarded([&] {
    need(out, "out");
    *out = new uq_datastore{uqkit::Datastore(dim)};
  });
}

uq_status uq_datastore_load(const char* path, uq_datastore** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new uq_datastore{uqkit::Datastore::load(path)};
  });
}

void uq_datastore_free(uq_datastore* store) { delete store; }

uq_status uq_datastore_save(const uq_datastore* store, const char* path) {
  return guarded([&] {
    need(store, "store");
    need(path, "path");
    store->store.save(path);
  });
}

size_t uq_datastore_size(const uq_datastore* store) { return store ? store->store.size() : 0; }

size_t uq_datastore_dim(const uq_datastore* store) { return store ? store->store.dim() : 0; }

uq_status uq_datastore_add(uq_datastore* store, const double* latent, size_t dim, double score) {
  return guarded([&] {
    need(store, "store");
    need(latent, "latent");
    store->store.add(std::span<const double>(latent, dim), score);
  });
}

uq_status uq_datastore_add_f32(uq_datastore* store, const float* latent, size_t dim, double score) {
  return guarded([&] {
    need(store, "store");
    need(latent, "latent");
    store->store.add(std::span<const float>(latent, dim), score);
  });
}

uq_status uq_datastore_get(const uq_datastore* store, size_t index, float* latent, double* score) {
  return guarded([&] {
    need(store, "store");
    const auto x = store->store.latent(index);
    if (latent) std::copy(x.begin(), x.end(), latent);
    if (score) *score = store->store.score(index);
  });
}

uq_status uq_datastore_query(const uq_datastore* store, const double* latent, size_t dim, size_t k,
                             uq_metric metric, size_t* indices, double* keys, double* scores,
                             size_t* count) {
  return guarded([&] {
    need(store, "store");
    need(latent, "latent");
    need(count, "count");
    write_neighbors(store->store.query(std::span<const double>(latent, dim), k, metric_of(metric)),
                    indices, keys, scores, count);
  });
}

uq_status uq_datastore_build_ivf(uq_datastore* store, size_t num_clusters, uint64_t seed) {
  return guarded([&] {
    need(store, "store");
    uqkit::Rng rng(seed);
    store->store.build_ivf(num_clusters, rng);
  });
}

uq_status uq_datastore_query_ivf(const uq_datastore* store, const double* latent, size_t dim,
                                 size_t k, uq_metric metric, size_t nprobe, size_t* indices,
                                 double* keys, double* scores, size_t* count) {
  return guarded([&] {
    need(store, "store");
    need(latent, "latent");
    need(count, "count");
    write_neighbors(store->store.query_ivf(std::span<const double>(latent, dim), k, metric_of(metric), nprobe),
                    indices, keys, scores, count);
  });
}

uq_status uq_conformal_generate_step(const uq_datastore* store, const double* latent, size_t dim,
                                     const double* probs, size_t vocab,
                                     const uq_generate_options* options, size_t* indices,
                                     size_t* size, uq_qhat* q_hat) {
  return guarded([&] {
    need(store, "store");
    need(latent, "latent");
    need(options, "options");
    need(indices, "indices");
    need(size, "size");
    const uqkit::GenerateOptions generate{options->alpha, options->k, options->tau,
                                          metric_of(options->metric), options->nprobe};
    const auto set = uqkit::conformal_generate_step(store->store, std::span<const double>(latent, dim),
                                                    probs_of(probs, vocab), generate);
    write_set(set, indices, size);
    if (q_hat) *q_hat = to_c(set.q_hat);
  });
}

uq_status uq_ece(const double* confidences, const int* correct, size_t n, size_t num_bins,
                 double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::ece(copy(confidences, n, "confidences"), flags_of(correct, n, "correct"), num_bins);
  });
}

uq_status uq_coverage_report(const size_t* set_sizes, const int* covered, size_t n, double alpha,
                             size_t vocab, size_t num_bins, uq_coverage_summary* out) {
  return guarded([&] {
    need(out, "out");
    if (n > 0) need(set_sizes, "set_sizes");
    const std::vector<std::size_t> sizes(set_sizes, set_sizes + n);
    const auto report = uqkit::coverage_report(std::span<const std::size_t>(sizes),
                                               std::span<const int>(flags_of(covered, n, "covered")),
                                               alpha, vocab, num_bins);
    *out = {report.coverage, report.width, report.ssc, report.ecg};
  });
}

uq_status uq_brier(const double* confidences, const int* correct, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::brier(copy(confidences, n, "confidences"), flags_of(correct, n, "correct"));
  });
}

uq_status uq_auroc(const double* scores, const int* labels, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::auroc(copy(scores, n, "scores"), flags_of(labels, n, "labels"));
  });
}

uq_status uq_aupr(const double* scores, const int* labels, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::aupr(copy(scores, n, "scores"), flags_of(labels, n, "labels"));
  });
}

uq_status uq_kendall_tau_b(const double* x, const double* y, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::kendall_tau_b(copy(x, n, "x"), copy(y, n, "y"));
  });
}

uq_status uq_uncertainty_metric(uq_uncertainty kind, const double* probs, size_t vocab, double* out) {
  return guarded([&] {
    need(out, "out");
    const auto p = probs_of(probs, vocab);
    switch (kind) {
      case UQ_MAX_PROB: *out = uqkit::max_prob(p); return;
      case UQ_PREDICTIVE_ENTROPY: *out = uqkit::predictive_entropy(p); return;
      case UQ_SOFTMAX_GAP: *out = uqkit::softmax_gap(p); return;
    }
    throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, "unknown uncertainty metric");
  });
}

uq_status uq_dempster_shafer(const double* logits, size_t k, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::dempster_shafer(copy(logits, k, "logits"));
  });
}

uq_status uq_variation_ratio(const size_t* predicted, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    if (n > 0) need(predicted, "predicted");
    const std::vector<std::size_t> labels(predicted, predicted + n);
    *out = uqkit::variation_ratio(std::span<const std::size_t>(labels));
  });
}

uq_status uq_ensemble_metric(uq_ensemble_kind kind, const double* matrix, size_t rows, size_t cols,
                             double* out) {
  return guarded([&] {
    need(out, "out");
    const auto m = rows_of(matrix, rows, cols);
    switch (kind) {
      case UQ_ENSEMBLE_VARIATION_RATIO: *out = uqkit::variation_ratio(std::span<const uqkit::ProbVector>(m)); return;
      case UQ_ENSEMBLE_CLASS_VARIANCE: *out = uqkit::class_variance(m); return;
      case UQ_ENSEMBLE_MUTUAL_INFORMATION: *out = uqkit::bma_mutual_information(m); return;
    }
    throw uqkit::Error(uqkit::ErrorCode::kInvalidArgument, "unknown ensemble metric");
  });
}

uq_status uq_dirichlet_summary_of(const double* alpha, size_t k, uq_dirichlet_summary* out) {
  return guarded([&] {
    need(out, "out");
    const uqkit::DirichletParams d(copy(alpha, k, "alpha"));
    *out = {d.alpha0(), uqkit::entropy(d), uqkit::expected_entropy(d),
            uqkit::mutual_information(d), uqkit::kl_uniform(d)};
  });
}

uq_status uq_dirichlet_moments(const double* alpha, size_t k, double* mean, double* log_expectation) {
  return guarded([&] {
    const uqkit::DirichletParams d(copy(alpha, k, "alpha"));
    const auto m = uqkit::mean(d);
    for (std::size_t j = 0; j < k; ++j) {
      if (mean) mean[j] = m[j];
      if (log_expectation) log_expectation[j] = uqkit::log_expectation(d, j);
    }
  });
}

uq_status uq_dirichlet_kl(const double* alpha, const double* reference, size_t k, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uqkit::kl(uqkit::DirichletParams(copy(alpha, k, "alpha")),
                     uqkit::DirichletParams(copy(reference, k, "reference")));
  });
}

uq_status uq_dirichlet_check(const double* alpha, const double* reference, size_t k, size_t samples,
                             uint64_t seed, uq_mc_comparison* out) {
  return guarded([&] {
    need(out, "out");
    uqkit::Rng rng(seed);
    const auto comparisons =
        uqkit::monte_carlo_check(uqkit::DirichletParams(copy(alpha, k, "alpha")),
                                 uqkit::DirichletParams(copy(reference, k, "reference")), samples, rng);
    for (std::size_t i = 0; i < comparisons.size(); ++i) {
      copy_name(out[i].quantity, sizeof out[i].quantity, comparisons[i].quantity);
      out[i].closed_form = comparisons[i].closed_form;
      out[i].estimate = comparisons[i].estimate;
      out[i].standard_error = comparisons[i].standard_error;
      out[i].z = comparisons[i].z;
    }
  });
}

void uq_study_config_default(uq_study_config* out) {
  if (!out) return;
  const uqkit::ConformalStudyConfig defaults;
  static const uq_metric kDefaultMetrics[] = {UQ_METRIC_L2};
  static const double kDefaultNoise[] = {0.0};
  *out = {};
  out->vocab_size = defaults.vocab_size;
  out->latent_dim = defaults.latent_dim;
  out->model_temperature = defaults.model.temperature;
  out->model_latent_noise = defaults.model.latent_noise;
  out->model_mixing_gain = defaults.model.mixing_gain;
  out->calibration_steps = defaults.calibration_steps;
  out->test_steps = defaults.test_steps;
  out->alpha = defaults.alpha;
  out->score = UQ_SCORE_ADAPTIVE;
  out->k = defaults.k;
  out->metrics = kDefaultMetrics;
  out->num_metrics = 1;
  out->tau = 0.0;
  out->noise_levels = kDefaultNoise;
  out->num_noise_levels = 1;
  out->include_split = 1;
  out->search = 0;
  out->search_tau_min = 0.0;
  out->search_tau_max = 0.0;
  out->search_eta = defaults.search_options.eta;
  out->search_iterations = defaults.search_options.steps;
  out->search_steps = defaults.search_steps;
  out->num_size_bins = defaults.num_size_bins;
  out->store_path = nullptr;
  out->save_store_path = nullptr;
  out->seed = 0;
  out->workers = 0;
}

uq_status uq_study_run(const uq_study_config* config, uq_study_result** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    uqkit::ConformalStudyConfig c;
    c.vocab_size = config->vocab_size;
    c.latent_dim = config->latent_dim;
    c.model.temperature = config->model_temperature;
    c.model.latent_noise = config->model_latent_noise;
    c.model.mixing_gain = config->model_mixing_gain;
    c.calibration_steps = config->calibration_steps;
    c.test_steps = config->test_steps;
    c.alpha = config->alpha;
    c.score = score_of(config->score);
    c.k = config->k;
    if (config->num_metrics > 0) need(config->metrics, "metrics");
    c.metrics.clear();
    for (std::size_t i = 0; i < config->num_metrics; ++i) c.metrics.push_back(metric_of(config->metrics[i]));
    if (config->tau > 0.0) c.tau = config->tau;
    c.noise_levels = copy(config->noise_levels, config->num_noise_levels, "noise_levels");
    c.include_split = config->include_split != 0;
    c.search = config->search != 0;
    c.search_bounds_set = config->search_tau_min > 0.0 || config->search_tau_max > 0.0;
    c.search_options.tau_min = config->search_tau_min;
    c.search_options.tau_max = config->search_tau_max;
    c.search_options.eta = config->search_eta;
    c.search_options.steps = config->search_iterations;
    c.search_steps = config->search_steps;
    c.num_size_bins = config->num_size_bins;
    if (config->store_path) c.store_path = config->store_path;
    if (config->save_store_path) c.save_store_path = config->save_store_path;
    c.seed = config->seed;
    c.workers = config->workers;
    *out = new uq_study_result{uqkit::run_conformal_study(c)};
  });
}

void uq_study_result_free(uq_study_result* result) { delete result; }

size_t uq_study_record_count(const uq_study_result* result) {
  return result ? result->result.records.size() : 0;
}

uq_status uq_study_record(const uq_study_result* result, size_t index, uq_condition_record* out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    uqkit::require(index < result->result.records.size(), "record index out of range");
    const auto& r = result->result.records[index];
    copy_name(out->method, sizeof out->method, r.method);
    copy_name(out->metric, sizeof out->metric, r.metric);
    out->tau = r.tau;
    out->alpha = r.alpha;
    out->noise = r.noise;
    out->coverage = r.coverage;
    out->width = r.width;
    out->ssc = r.ssc;
    out->ecg = r.ecg;
    out->mean_set_size = r.mean_set_size;
    out->full_fraction = r.full_fraction;
    out->seed = r.seed;
  });
}

double uq_study_latent_std(const uq_study_result* result) {
  return result ? result->result.latent_std : 0.0;
}

uq_qhat uq_study_split_q_hat(const uq_study_result* result) {
  return result ? to_c(result->result.split_q_hat) : uq_qhat{1, 0.0};
}

int uq_study_unit_weights_match_split(const uq_study_result* result) {
  return result && result->result.unit_weights_match_split ? 1 : 0;
}

unsigned uq_default_workers(void) { return uqkit::default_workers(); }

uint64_t uq_derive_seed(uint64_t master, uint64_t index) { return uqkit::derive_seed(master, index); }

}  // extern "C"
