/* C interface to uqkit. All functions return a uq_status; on failure the
 * message is available from uq_last_error() on the calling thread until the
 * next failing call. Output pointers are left untouched on failure. Handles
 * are opaque and owned by the caller, who releases them with the matching
 * *_free function (NULL is accepted). */
#ifndef UQKIT_UQKIT_H
#define UQKIT_UQKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(UQKIT_BUILDING_LIBRARY)
#define UQKIT_API __attribute__((visibility("default")))
#else
#define UQKIT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uq_status {
  UQ_OK = 0,
  UQ_ERR_INVALID_ARGUMENT = 1,
  UQ_ERR_DATA = 2,
  UQ_ERR_IO = 3,
  UQ_ERR_FORMAT = 4,
  UQ_ERR_INTERNAL = 5
} uq_status;

UQKIT_API const char* uq_last_error(void);
UQKIT_API const char* uq_version(void);
UQKIT_API const char* uq_status_name(uq_status status);

/* ---- empirical ---------------------------------------------------------- */

UQKIT_API uq_status uq_empirical_cdf(const double* x, size_t n, double t, double* out);
UQKIT_API uq_status uq_empirical_quantile(const double* x, size_t n, double p, double* out);
/* Writes m values to out. */
UQKIT_API uq_status uq_bootstrap_resample(const double* x, size_t n, size_t m, uint64_t seed,
                                          double* out);

/* ---- significance ------------------------------------------------------- */

typedef enum uq_test_kind {
  UQ_TEST_ASO = 0,
  UQ_TEST_STUDENT_T = 1,
  UQ_TEST_BOOTSTRAP = 2,
  UQ_TEST_PERMUTATION = 3,
  UQ_TEST_WILCOXON = 4,
  UQ_TEST_MANN_WHITNEY = 5
} uq_test_kind;

UQKIT_API uq_status uq_test_kind_parse(const char* name, uq_test_kind* out);
UQKIT_API const char* uq_test_kind_name(uq_test_kind kind);

typedef struct uq_aso_result {
  double eps_min;
  double violation_ratio;
  double sigma_hat;
} uq_aso_result;

UQKIT_API uq_status uq_violation_ratio(const double* a, size_t na, const double* b, size_t nb,
                                       double dt, double* out);
UQKIT_API uq_status uq_aso(const double* a, size_t na, const double* b, size_t nb, double alpha,
                           size_t num_bootstrap, double dt, uint64_t seed, uq_aso_result* out);
/* kind must not be UQ_TEST_ASO. */
UQKIT_API uq_status uq_classic_test(uq_test_kind kind, const double* a, size_t na,
                                    const double* b, size_t nb, size_t resamples, uint64_t seed,
                                    double* statistic, double* p_value);
UQKIT_API uq_status uq_bonferroni(double alpha, size_t num_comparisons, double* out);

/* ---- error-rate simulation ---------------------------------------------- */

typedef struct uq_dist uq_dist;

/* "normal:M:S", "laplace:L:S", "rayleigh:S", "mixture", "mixture:W:M:S...". */
UQKIT_API uq_status uq_dist_parse(const char* text, uq_dist** out);
UQKIT_API void uq_dist_free(uq_dist* dist);
/* Canonical spelling. Writes at most capacity bytes including the
 * terminator; *needed receives the full length plus one. */
UQKIT_API uq_status uq_dist_to_string(const uq_dist* dist, char* buffer, size_t capacity,
                                      size_t* needed);
UQKIT_API uq_status uq_dist_sample(const uq_dist* dist, size_t n, uint64_t seed, double* out);

typedef struct uq_test_spec {
  uq_test_kind kind;
  double aso_alpha;        /* confidence level of eps_min, default 0.05 */
  size_t aso_bootstrap;    /* default 1000 */
  double aso_dt;           /* default 0.005 */
  size_t resamples;        /* bootstrap / permutation tests, default 1000 */
} uq_test_spec;

UQKIT_API void uq_test_spec_default(uq_test_kind kind, uq_test_spec* out);

typedef struct uq_rate_report {
  double threshold;
  double rate;
  double se;
} uq_rate_report;

/* One simulation of `trials` trials evaluated at each threshold. Type I
 * when b is NULL (both samples from a); otherwise type II with a the better
 * system. Results do not depend on `workers` (0 = default). */
UQKIT_API uq_status uq_rate_sweep(const uq_test_spec* test, const uq_dist* a, const uq_dist* b,
                                  size_t n, size_t trials, const double* thresholds,
                                  size_t num_thresholds, uint64_t seed, unsigned workers,
                                  uq_rate_report* out);

/* ---- conformal ---------------------------------------------------------- */

typedef enum uq_score_kind { UQ_SCORE_SIMPLE = 0, UQ_SCORE_ADAPTIVE = 1 } uq_score_kind;
typedef enum uq_metric { UQ_METRIC_L2 = 0, UQ_METRIC_IP = 1, UQ_METRIC_COSINE = 2 } uq_metric;
typedef enum uq_set_kind { UQ_SET_ADAPTIVE = 0, UQ_SET_THRESHOLD = 1 } uq_set_kind;

UQKIT_API uq_status uq_metric_parse(const char* name, uq_metric* out);
UQKIT_API const char* uq_metric_name(uq_metric metric);
UQKIT_API uq_status uq_score_kind_parse(const char* name, uq_score_kind* out);

/* A quantile; is_full != 0 marks the FULL sentinel and value is then 0. */
typedef struct uq_qhat {
  int is_full;
  double value;
} uq_qhat;

UQKIT_API uq_status uq_score(uq_score_kind kind, const double* probs, size_t vocab, size_t label,
                             double* out);
UQKIT_API uq_status uq_split_quantile(const double* scores, size_t n, double alpha, uq_qhat* out);
UQKIT_API uq_status uq_weighted_quantile(const double* scores, const double* weights, size_t n,
                                         double alpha, uq_qhat* out);
UQKIT_API uq_status uq_rbf_weights(const double* keys, size_t n, double tau, uq_metric metric,
                                   double* out);
/* indices must hold vocab entries; *size receives the set size. */
UQKIT_API uq_status uq_build_set(uq_set_kind kind, const double* probs, size_t vocab, uq_qhat q_hat,
                                 size_t* indices, size_t* size);

typedef double (*uq_coverage_fn)(double tau, void* user);

typedef struct uq_search_options {
  double alpha;
  double tau_min;
  double tau_max;
  double eta;
  size_t steps;
} uq_search_options;

UQKIT_API uq_status uq_temperature_search(uq_coverage_fn coverage, void* user,
                                          const uq_search_options* options, uint64_t seed,
                                          double* tau, double* achieved_coverage);

/* ---- datastore ---------------------------------------------------------- */

typedef struct uq_datastore uq_datastore;

UQKIT_API uq_status uq_datastore_new(size_t dim, uq_datastore** out);
UQKIT_API uq_status uq_datastore_load(const char* path, uq_datastore** out);
UQKIT_API void uq_datastore_free(uq_datastore* store);
UQKIT_API uq_status uq_datastore_save(const uq_datastore* store, const char* path);
UQKIT_API size_t uq_datastore_size(const uq_datastore* store);
UQKIT_API size_t uq_datastore_dim(const uq_datastore* store);
UQKIT_API uq_status uq_datastore_add(uq_datastore* store, const double* latent, size_t dim,
                                     double score);
UQKIT_API uq_status uq_datastore_add_f32(uq_datastore* store, const float* latent, size_t dim,
                                         double score);
/* latent must hold dim floats. */
UQKIT_API uq_status uq_datastore_get(const uq_datastore* store, size_t index, float* latent,
                                     double* score);
/* Writes up to k results; *count receives min(k, size). Any of indices,
 * keys, scores may be NULL. */
UQKIT_API uq_status uq_datastore_query(const uq_datastore* store, const double* latent, size_t dim,
                                       size_t k, uq_metric metric, size_t* indices, double* keys,
                                       double* scores, size_t* count);
UQKIT_API uq_status uq_datastore_build_ivf(uq_datastore* store, size_t num_clusters, uint64_t seed);
UQKIT_API uq_status uq_datastore_query_ivf(const uq_datastore* store, const double* latent,
                                           size_t dim, size_t k, uq_metric metric, size_t nprobe,
                                           size_t* indices, double* keys, double* scores,
                                           size_t* count);

typedef struct uq_generate_options {
  double alpha;
  size_t k;
  double tau;
  uq_metric metric;
  size_t nprobe; /* 0 = exact search */
} uq_generate_options;

/* indices must hold vocab entries. */
UQKIT_API uq_status uq_conformal_generate_step(const uq_datastore* store, const double* latent,
                                               size_t dim, const double* probs, size_t vocab,
                                               const uq_generate_options* options, size_t* indices,
                                               size_t* size, uq_qhat* q_hat);

/* ---- calibration and uncertainty metrics -------------------------------- */

UQKIT_API uq_status uq_ece(const double* confidences, const int* correct, size_t n,
                           size_t num_bins, double* out);

typedef struct uq_coverage_summary {
  double coverage;
  double width;
  double ssc;
  double ecg;
} uq_coverage_summary;

UQKIT_API uq_status uq_coverage_report(const size_t* set_sizes, const int* covered, size_t n,
                                       double alpha, size_t vocab, size_t num_bins,
                                       uq_coverage_summary* out);
UQKIT_API uq_status uq_brier(const double* confidences, const int* correct, size_t n, double* out);
UQKIT_API uq_status uq_auroc(const double* scores, const int* labels, size_t n, double* out);
UQKIT_API uq_status uq_aupr(const double* scores, const int* labels, size_t n, double* out);
UQKIT_API uq_status uq_kendall_tau_b(const double* x, const double* y, size_t n, double* out);

typedef enum uq_uncertainty {
  UQ_MAX_PROB = 0,
  UQ_PREDICTIVE_ENTROPY = 1,
  UQ_SOFTMAX_GAP = 2
} uq_uncertainty;

UQKIT_API uq_status uq_uncertainty_metric(uq_uncertainty kind, const double* probs, size_t vocab,
                                          double* out);
UQKIT_API uq_status uq_dempster_shafer(const double* logits, size_t k, double* out);
UQKIT_API uq_status uq_variation_ratio(const size_t* predicted, size_t n, double* out);

typedef enum uq_ensemble_kind {
  UQ_ENSEMBLE_VARIATION_RATIO = 0,
  UQ_ENSEMBLE_CLASS_VARIANCE = 1,
  UQ_ENSEMBLE_MUTUAL_INFORMATION = 2
} uq_ensemble_kind;

/* rows x cols row-major matrix of probability vectors. */
UQKIT_API uq_status uq_ensemble_metric(uq_ensemble_kind kind, const double* matrix, size_t rows,
                                       size_t cols, double* out);

/* ---- Dirichlet ---------------------------------------------------------- */

typedef struct uq_dirichlet_summary {
  double alpha0;
  double entropy;
  double expected_entropy;
  double mutual_information;
  double kl_uniform;
} uq_dirichlet_summary;

UQKIT_API uq_status uq_dirichlet_summary_of(const double* alpha, size_t k,
                                            uq_dirichlet_summary* out);
/* mean and log_expectation each receive k values; either may be NULL. */
UQKIT_API uq_status uq_dirichlet_moments(const double* alpha, size_t k, double* mean,
                                         double* log_expectation);
UQKIT_API uq_status uq_dirichlet_kl(const double* alpha, const double* reference, size_t k,
                                    double* out);

typedef struct uq_mc_comparison {
  char quantity[40];
  double closed_form;
  double estimate;
  double standard_error;
  double z;
} uq_mc_comparison;

/* Writes 2k + 4 comparisons (k means, k log-expectations, entropy,
 * expected entropy, KL against reference, mutual information). */
UQKIT_API uq_status uq_dirichlet_check(const double* alpha, const double* reference, size_t k,
                                       size_t samples, uint64_t seed, uq_mc_comparison* out);

/* ---- synthetic-model conformal study ------------------------------------ */

typedef struct uq_study_config {
  size_t vocab_size;
  size_t latent_dim;
  double model_temperature;
  double model_latent_noise;
  double model_mixing_gain;
  size_t calibration_steps;
  size_t test_steps;
  double alpha;
  uq_score_kind score;
  size_t k;
  const uq_metric* metrics;
  size_t num_metrics;
  double tau; /* <= 0: automatic per metric */
  const double* noise_levels;
  size_t num_noise_levels;
  int include_split;
  int search;
  double search_tau_min; /* search bounds; both <= 0 derives them from the automatic tau */
  double search_tau_max;
  double search_eta;
  size_t search_iterations;
  size_t search_steps;
  size_t num_size_bins;
  const char* store_path;      /* optional calibration store to use instead of generating one */
  const char* save_store_path; /* optional path to write the calibration store to */
  uint64_t seed;
  unsigned workers;
} uq_study_config;

UQKIT_API void uq_study_config_default(uq_study_config* out);

typedef struct uq_condition_record {
  char method[16];
  char metric[16];
  double tau;
  double alpha;
  double noise;
  double coverage;
  double width;
  double ssc;
  double ecg;
  double mean_set_size;
  double full_fraction;
  uint64_t seed;
} uq_condition_record;

typedef struct uq_study_result uq_study_result;

UQKIT_API uq_status uq_study_run(const uq_study_config* config, uq_study_result** out);
UQKIT_API void uq_study_result_free(uq_study_result* result);
UQKIT_API size_t uq_study_record_count(const uq_study_result* result);
UQKIT_API uq_status uq_study_record(const uq_study_result* result, size_t index,
                                    uq_condition_record* out);
UQKIT_API double uq_study_latent_std(const uq_study_result* result);
UQKIT_API uq_qhat uq_study_split_q_hat(const uq_study_result* result);
UQKIT_API int uq_study_unit_weights_match_split(const uq_study_result* result);

/* ---- utilities ---------------------------------------------------------- */

/* Worker count used for workers == 0 (UQKIT_THREADS or hardware). */
UQKIT_API unsigned uq_default_workers(void);
UQKIT_API uint64_t uq_derive_seed(uint64_t master, uint64_t index);

#ifdef __cplusplus
}
#endif

#endif /* UQKIT_UQKIT_H */
