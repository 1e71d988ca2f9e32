// uqkit command-line harness. Talks to the library only through uqkit.h.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "svg_plot.hpp"
#include "uqkit/uqkit.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 1;

constexpr const char* kAsoSimSchema = "uqkit.aso-sim/1";
constexpr const char* kConformalSchema = "uqkit.conformal-eval/1";
constexpr const char* kDirichletSchema = "uqkit.dirichlet-check/1";
constexpr const char* kInfoSchema = "uqkit.datastore-info/1";
constexpr const char* kDumpSchema = "uqkit.datastore-dump/1";

struct CliError : std::runtime_error {
  CliError(int exit_code, std::string status, const std::string& message)
      : std::runtime_error(message), exit_code(exit_code), status(std::move(status)) {}
  int exit_code;
  std::string status;
};

void check(uq_status status) {
  if (status == UQ_OK) return;
  const int code = status == UQ_ERR_INVALID_ARGUMENT ? kExitUsage
                   : status == UQ_ERR_INTERNAL       ? kExitInternal
                                                     : kExitData;
  throw CliError(code, uq_status_name(status), uq_last_error());
}

[[noreturn]] void usage_error(const std::string& message) {
  throw CliError(kExitUsage, "usage error", message);
}

[[noreturn]] void data_error(const std::string& message) {
  throw CliError(kExitData, "data error", message);
}

std::string shortest(double x) {
  char buffer[32];
  if (x == std::trunc(x) && std::fabs(x) < 1e15) {
    std::snprintf(buffer, sizeof buffer, "%.0f", x);
    return buffer;
  }
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, x);
    if (std::strtod(buffer, nullptr) == x) break;
  }
  return buffer;
}

std::string float_text(float x) {
  char buffer[32];
  for (int precision = 1; precision <= 9; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, static_cast<double>(x));
    if (std::strtof(buffer, nullptr) == x) break;
  }
  return buffer;
}

void emit(const std::string& content, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) data_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) data_error("failed writing '" + path + "'");
}

// --threads wins when given; UQKIT_THREADS caps it.
unsigned resolve_workers(std::optional<unsigned> requested) {
  if (!requested) return uq_default_workers();
  unsigned workers = std::max(1u, *requested);
  if (const char* env = std::getenv("UQKIT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) workers = std::min(workers, static_cast<unsigned>(cap));
  }
  return workers;
}

void plot_or_report(const std::function<void()>& plot) {
  try {
    plot();
  } catch (const std::runtime_error& e) {
    data_error(e.what());
  }
}

struct DistHandle {
  explicit DistHandle(const std::string& text) { check(uq_dist_parse(text.c_str(), &dist)); }
  ~DistHandle() { uq_dist_free(dist); }
  DistHandle(const DistHandle&) = delete;
  DistHandle& operator=(const DistHandle&) = delete;

  std::string canonical() const {
    std::size_t needed = 0;
    check(uq_dist_to_string(dist, nullptr, 0, &needed));
    std::string text(needed, '\0');
    check(uq_dist_to_string(dist, text.data(), needed, &needed));
    text.resize(needed - 1);
    return text;
  }

  uq_dist* dist = nullptr;
};

struct DatastoreHandle {
  DatastoreHandle() = default;
  ~DatastoreHandle() { uq_datastore_free(store); }
  DatastoreHandle(const DatastoreHandle&) = delete;
  DatastoreHandle& operator=(const DatastoreHandle&) = delete;
  uq_datastore* store = nullptr;
};

// ---- aso-sim ---------------------------------------------------------------

struct AsoSimOptions {
  std::vector<std::string> tests{"aso"};
  std::vector<std::string> dists{"normal:0:1.5"};
  std::string against;
  std::vector<std::size_t> sizes{5, 10, 15, 20};
  std::vector<double> taus{0.2};
  std::vector<double> p_thresholds{0.05};
  std::optional<std::size_t> trials;
  double alpha = 0.05;
  std::size_t bootstrap = 1000;
  double dt = 0.005;
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  std::optional<unsigned> threads;
  std::string out;
  std::string plot;
};

struct RateRow {
  std::string test;
  std::string dist;
  std::size_t n;
  double threshold;
  std::size_t trials;
  double rate;
  double se;
};

void run_aso_sim(const AsoSimOptions& o) {
  const unsigned workers = resolve_workers(o.threads);
  std::optional<DistHandle> against;
  if (!o.against.empty()) against.emplace(o.against);

  std::vector<RateRow> rows;
  for (const auto& test_name : o.tests) {
    uq_test_kind kind;
    check(uq_test_kind_parse(test_name.c_str(), &kind));
    uq_test_spec spec;
    uq_test_spec_default(kind, &spec);
    spec.aso_alpha = o.alpha;
    spec.aso_bootstrap = o.bootstrap;
    spec.aso_dt = o.dt;
    spec.resamples = o.resamples;
    const auto& thresholds = kind == UQ_TEST_ASO ? o.taus : o.p_thresholds;
    const std::size_t trials = o.trials.value_or(kind == UQ_TEST_ASO ? 500 : 1000);

    for (const auto& dist_text : o.dists) {
      const DistHandle dist(dist_text);
      std::string dist_name = dist.canonical();
      if (against) dist_name += "/" + against->canonical();
      for (std::size_t n : o.sizes) {
        std::vector<uq_rate_report> reports(thresholds.size());
        check(uq_rate_sweep(&spec, dist.dist, against ? against->dist : nullptr, n, trials,
                            thresholds.data(), thresholds.size(), o.seed, workers, reports.data()));
        for (const auto& r : reports) {
          rows.push_back({uq_test_kind_name(kind), dist_name, n, r.threshold, trials, r.rate, r.se});
        }
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const RateRow& a, const RateRow& b) {
    return std::tie(a.test, a.dist, a.n, a.threshold) < std::tie(b.test, b.dist, b.n, b.threshold);
  });

  std::ostringstream csv;
  csv << "# schema: " << kAsoSimSchema << " error=" << (against ? "type2" : "type1") << "\n";
  csv << "test,dist,n,threshold,trials,rate,se,seed\n";
  for (const auto& r : rows) {
    csv << r.test << ',' << r.dist << ',' << r.n << ',' << shortest(r.threshold) << ',' << r.trials
        << ',' << shortest(r.rate) << ',' << shortest(r.se) << ',' << o.seed << '\n';
  }
  emit(csv.str(), o.out);

  if (!o.plot.empty()) {
    std::vector<uqkit::cli::Series> series;
    for (const auto& r : rows) {
      const std::string name = r.test + " " + r.dist + " @" + shortest(r.threshold);
      auto it = std::find_if(series.begin(), series.end(), [&](const auto& s) { return s.name == name; });
      if (it == series.end()) it = series.insert(series.end(), uqkit::cli::Series{name, {}, {}});
      it->x.push_back(static_cast<double>(r.n));
      it->y.push_back(r.rate);
    }
    plot_or_report([&] {
      uqkit::cli::write_line_chart(o.plot, against ? "Type II error rate" : "Type I error rate",
                                   "sample size n", "rate", series);
    });
  }
}

// ---- conformal-eval --------------------------------------------------------

struct ConformalOptions {
  std::size_t vocab = 100;
  std::size_t dim = 16;
  std::size_t calibration = 2000;
  std::size_t test = 2000;
  double alpha = 0.1;
  std::string score = "adaptive";
  std::size_t k = 100;
  std::vector<std::string> metrics{"l2"};
  std::optional<double> tau;
  std::vector<double> noise{0.0};
  bool no_split = false;
  bool search = false;
  std::optional<double> tau_min;
  std::optional<double> tau_max;
  double eta = 0.1;
  std::size_t search_iterations = 20;
  std::size_t search_steps = 500;
  std::size_t bins = 75;
  double model_temperature = 2.0;
  std::string store;
  std::string save_store;
  std::uint64_t seed = 0;
  std::optional<unsigned> threads;
  std::string out;
  std::string plot;
};

void run_conformal_eval(const ConformalOptions& o) {
  if (o.tau && !(*o.tau > 0.0)) usage_error("--tau must be positive");
  if (o.tau_min.has_value() != o.tau_max.has_value()) usage_error("--tau-min and --tau-max go together");

  uq_study_config config;
  uq_study_config_default(&config);
  config.vocab_size = o.vocab;
  config.latent_dim = o.dim;
  config.model_temperature = o.model_temperature;
  config.calibration_steps = o.calibration;
  config.test_steps = o.test;
  config.alpha = o.alpha;
  check(uq_score_kind_parse(o.score.c_str(), &config.score));
  config.k = o.k;
  std::vector<uq_metric> metrics;
  for (const auto& name : o.metrics) {
    uq_metric metric;
    check(uq_metric_parse(name.c_str(), &metric));
    metrics.push_back(metric);
  }
  config.metrics = metrics.data();
  config.num_metrics = metrics.size();
  config.tau = o.tau.value_or(0.0);
  config.noise_levels = o.noise.data();
  config.num_noise_levels = o.noise.size();
  config.include_split = o.no_split ? 0 : 1;
  config.search = o.search ? 1 : 0;
  config.search_tau_min = o.tau_min.value_or(0.0);
  config.search_tau_max = o.tau_max.value_or(0.0);
  config.search_eta = o.eta;
  config.search_iterations = o.search_iterations;
  config.search_steps = o.search_steps;
  config.num_size_bins = o.bins;
  config.store_path = o.store.empty() ? nullptr : o.store.c_str();
  config.save_store_path = o.save_store.empty() ? nullptr : o.save_store.c_str();
  config.seed = o.seed;
  config.workers = resolve_workers(o.threads);

  uq_study_result* raw = nullptr;
  check(uq_study_run(&config, &raw));
  std::unique_ptr<uq_study_result, decltype(&uq_study_result_free)> result(raw, uq_study_result_free);

  std::vector<uq_condition_record> records(uq_study_record_count(result.get()));
  for (std::size_t i = 0; i < records.size(); ++i) check(uq_study_record(result.get(), i, &records[i]));
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(std::string_view(a.method), std::string_view(a.metric), a.noise) <
           std::make_tuple(std::string_view(b.method), std::string_view(b.metric), b.noise);
  });

  const uq_qhat split = uq_study_split_q_hat(result.get());
  json doc;
  doc["schema"] = kConformalSchema;
  doc["seed"] = o.seed;
  doc["config"] = {{"vocab", o.vocab},
                   {"dim", o.dim},
                   {"calibration_steps", o.calibration},
                   {"test_steps", o.test},
                   {"alpha", o.alpha},
                   {"score", o.score},
                   {"k", o.k},
                   {"metrics", o.metrics},
                   {"tau", o.tau ? json(*o.tau) : json("auto")},
                   {"noise", o.noise},
                   {"search", o.search},
                   {"size_bins", o.bins},
                   {"model_temperature", o.model_temperature},
                   {"store", o.store.empty() ? json(nullptr) : json(o.store)}};
  doc["latent_std"] = uq_study_latent_std(result.get());
  doc["split_q_hat"] = split.is_full ? std::string("FULL") : shortest(split.value);
  doc["unit_weights_match_split"] = uq_study_unit_weights_match_split(result.get()) != 0;
  json rows = json::array();
  for (const auto& r : records) {
    const bool is_split = std::string_view(r.method) == "split";
    rows.push_back({{"method", r.method},
                    {"metric", r.metric},
                    {"tau", is_split ? json(nullptr) : json(r.tau)},
                    {"alpha", r.alpha},
                    {"noise", r.noise},
                    {"coverage", r.coverage},
                    {"width", r.width},
                    {"ssc", r.ssc},
                    {"ecg", r.ecg},
                    {"mean_set_size", r.mean_set_size},
                    {"full_fraction", r.full_fraction},
                    {"seed", r.seed}});
  }
  doc["records"] = std::move(rows);
  emit(doc.dump(2) + "\n", o.out);

  if (!o.plot.empty()) {
    std::vector<uqkit::cli::Bar> bars;
    for (const auto& r : records) {
      std::string label = std::string(r.method) + "/" + r.metric + " noise=" + shortest(r.noise);
      bars.push_back({std::move(label), r.coverage});
    }
    plot_or_report([&] {
      uqkit::cli::write_bar_chart(o.plot, "Coverage per condition", "coverage", bars, 1.0 - o.alpha);
    });
  }
}

// ---- dirichlet-check -------------------------------------------------------

struct DirichletOptions {
  std::vector<double> alpha;
  std::vector<double> reference;
  std::size_t cases = 20;
  std::size_t k_max = 8;
  double alpha_min = 0.2;
  double alpha_max = 10.0;
  std::size_t samples = 100000;
  double z_limit = 4.0;
  std::uint64_t seed = 0;
  std::optional<unsigned> threads;
  std::string out;
};

// Portable draws: only the engine is standardised, so map its output by hand.
struct CaseGenerator {
  explicit CaseGenerator(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine() >> 11) * 0x1.0p-53;
  }
  std::vector<double> vector(std::size_t k, double lo, double hi) {
    std::vector<double> v(k);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  std::mt19937_64 engine;
};

struct DirichletCase {
  std::vector<double> alpha;
  std::vector<double> reference;
  json result;
  double max_abs_z = 0.0;
  double decomposition_error = 0.0;
};

void evaluate_case(DirichletCase& c, std::size_t samples, std::uint64_t seed) {
  const std::size_t k = c.alpha.size();
  uq_dirichlet_summary summary;
  check(uq_dirichlet_summary_of(c.alpha.data(), k, &summary));
  std::vector<double> mean(k);
  check(uq_dirichlet_moments(c.alpha.data(), k, mean.data(), nullptr));
  double mean_entropy = 0.0;
  check(uq_uncertainty_metric(UQ_PREDICTIVE_ENTROPY, mean.data(), k, &mean_entropy));
  double kl_reference = 0.0;
  check(uq_dirichlet_kl(c.alpha.data(), c.reference.data(), k, &kl_reference));
  std::vector<uq_mc_comparison> comparisons(2 * k + 4);
  check(uq_dirichlet_check(c.alpha.data(), c.reference.data(), k, samples, seed, comparisons.data()));

  c.decomposition_error = std::fabs(mean_entropy - summary.expected_entropy - summary.mutual_information);
  json rows = json::array();
  for (const auto& m : comparisons) {
    c.max_abs_z = std::max(c.max_abs_z, std::fabs(m.z));
    rows.push_back({{"quantity", m.quantity},
                    {"closed_form", m.closed_form},
                    {"estimate", m.estimate},
                    {"se", m.standard_error},
                    {"z", m.z}});
  }
  c.result = {{"alpha", c.alpha},
              {"reference", c.reference},
              {"alpha0", summary.alpha0},
              {"entropy", summary.entropy},
              {"expected_entropy", summary.expected_entropy},
              {"mutual_information", summary.mutual_information},
              {"kl_uniform", summary.kl_uniform},
              {"kl_reference", kl_reference},
              {"decomposition_error", c.decomposition_error},
              {"max_abs_z", c.max_abs_z},
              {"comparisons", std::move(rows)}};
}

void run_dirichlet_check(const DirichletOptions& o) {
  if (o.k_max < 2) usage_error("--k-max must be at least 2");
  if (!(o.alpha_min > 0.0 && o.alpha_min < o.alpha_max)) usage_error("need 0 < --alpha-min < --alpha-max");
  if (!o.reference.empty() && o.reference.size() != o.alpha.size()) {
    usage_error("--reference must have as many entries as --alpha");
  }

  std::vector<DirichletCase> cases;
  if (!o.alpha.empty()) {
    DirichletCase c;
    c.alpha = o.alpha;
    c.reference = o.reference.empty() ? std::vector<double>(o.alpha.size(), 1.0) : o.reference;
    cases.push_back(std::move(c));
  } else {
    if (o.cases == 0) usage_error("--cases must be at least 1");
    for (std::size_t i = 0; i < o.cases; ++i) {
      CaseGenerator gen(uq_derive_seed(o.seed, 2 * i));
      const std::size_t k = 2 + static_cast<std::size_t>(gen.engine() % (o.k_max - 1));
      DirichletCase c;
      c.alpha = gen.vector(k, o.alpha_min, o.alpha_max);
      c.reference = gen.vector(k, o.alpha_min, o.alpha_max);
      cases.push_back(std::move(c));
    }
  }

  // Each case has its own stream, so the worker count cannot change results.
  const unsigned workers = std::min<std::size_t>(resolve_workers(o.threads), cases.size());
  std::vector<std::optional<CliError>> failures(cases.size());
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < cases.size(); i += workers) {
      try {
        evaluate_case(cases[i], o.samples, uq_derive_seed(o.seed, 2 * i + 1));
      } catch (const CliError& e) {
        failures[i] = e;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) throw *f;
  }

  double max_abs_z = 0.0;
  double max_decomposition = 0.0;
  json rows = json::array();
  for (const auto& c : cases) {
    max_abs_z = std::max(max_abs_z, c.max_abs_z);
    max_decomposition = std::max(max_decomposition, c.decomposition_error);
    rows.push_back(c.result);
  }
  json doc;
  doc["schema"] = kDirichletSchema;
  doc["seed"] = o.seed;
  doc["samples"] = o.samples;
  doc["entropy_units"] = "nats";
  doc["max_abs_z"] = max_abs_z;
  doc["z_limit"] = o.z_limit;
  doc["max_decomposition_error"] = max_decomposition;
  doc["passed"] = max_abs_z <= o.z_limit && max_decomposition <= 1e-10;
  doc["cases"] = std::move(rows);
  emit(doc.dump(2) + "\n", o.out);
  std::cerr << "max |z| = " << shortest(max_abs_z) << " over " << cases.size() << " case(s)\n";
}

// ---- datastore -------------------------------------------------------------

void run_datastore_info(const std::string& path, const std::string& out) {
  DatastoreHandle h;
  check(uq_datastore_load(path.c_str(), &h.store));
  const std::size_t count = uq_datastore_size(h.store);
  const std::size_t dim = uq_datastore_dim(h.store);
  json doc;
  doc["schema"] = kInfoSchema;
  doc["path"] = path;
  doc["version"] = 1;
  doc["dim"] = dim;
  doc["count"] = count;
  if (count == 0) {
    doc["score_min"] = nullptr;
    doc["score_max"] = nullptr;
    doc["score_mean"] = nullptr;
  } else {
    double lo = INFINITY;
    double hi = -INFINITY;
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      double score = 0.0;
      check(uq_datastore_get(h.store, i, nullptr, &score));
      lo = std::min(lo, score);
      hi = std::max(hi, score);
      sum += score;
    }
    doc["score_min"] = lo;
    doc["score_max"] = hi;
    doc["score_mean"] = sum / static_cast<double>(count);
  }
  emit(doc.dump(2) + "\n", out);
}

void run_datastore_dump(const std::string& path, const std::string& out) {
  DatastoreHandle h;
  check(uq_datastore_load(path.c_str(), &h.store));
  const std::size_t count = uq_datastore_size(h.store);
  const std::size_t dim = uq_datastore_dim(h.store);
  std::ostringstream csv;
  csv << "# schema: " << kDumpSchema << " dim=" << dim << "\n";
  csv << "index,score";
  for (std::size_t j = 0; j < dim; ++j) csv << ",z" << j;
  csv << "\n";
  std::vector<float> latent(dim);
  for (std::size_t i = 0; i < count; ++i) {
    double score = 0.0;
    check(uq_datastore_get(h.store, i, latent.data(), &score));
    csv << i << ',' << shortest(score);
    for (float x : latent) csv << ',' << float_text(x);
    csv << '\n';
  }
  emit(csv.str(), out);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <class T>
T parse_field(const std::string& text, std::size_t line_number) {
  char* end = nullptr;
  errno = 0;
  T value;
  if constexpr (std::is_same_v<T, float>) {
    value = std::strtof(text.c_str(), &end);
  } else {
    value = std::strtod(text.c_str(), &end);
  }
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    data_error("line " + std::to_string(line_number) + ": invalid number '" + text + "'");
  }
  return value;
}

void run_datastore_rebuild(const std::string& csv_path, const std::string& out) {
  if (out.empty() || out == "-") usage_error("rebuild needs --out FILE");
  std::ifstream in(csv_path);
  if (!in) data_error("cannot open '" + csv_path + "' for reading");
  std::string line;
  std::size_t line_number = 0;
  std::optional<std::size_t> dim;
  DatastoreHandle h;
  std::vector<float> latent;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_csv_line(line);
    if (!dim) {
      if (fields.size() < 3 || fields[0] != "index" || fields[1] != "score") {
        data_error("line " + std::to_string(line_number) + ": expected header 'index,score,z0,...'");
      }
      dim = fields.size() - 2;
      check(uq_datastore_new(*dim, &h.store));
      latent.resize(*dim);
      continue;
    }
    if (fields.size() != *dim + 2) {
      data_error("line " + std::to_string(line_number) + ": expected " + std::to_string(*dim + 2) + " fields");
    }
    const auto score = parse_field<double>(fields[1], line_number);
    for (std::size_t j = 0; j < *dim; ++j) latent[j] = parse_field<float>(fields[j + 2], line_number);
    check(uq_datastore_add_f32(h.store, latent.data(), *dim, score));
  }
  if (!dim) data_error("'" + csv_path + "' has no header line");
  check(uq_datastore_save(h.store, out.c_str()));
}

void add_common(CLI::App* sub, std::uint64_t& seed, std::optional<unsigned>& threads, std::string& out) {
  sub->add_option("--seed", seed, "Master random seed")->capture_default_str();
  sub->add_option("--threads", threads, "Worker threads (UQKIT_THREADS caps this)");
  sub->add_option("-o,--out", out, "Output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uqkit: significance testing, conformal prediction and uncertainty metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(uq_version()));

  AsoSimOptions aso;
  auto* aso_cmd = app.add_subcommand("aso-sim", "Type I / II error rates of ASO and classical tests");
  aso_cmd->add_option("--test", aso.tests, "aso, student-t, bootstrap, permutation, wilcoxon, mann-whitney")
      ->delimiter(',')
      ->capture_default_str();
  aso_cmd->add_option("--dist", aso.dists, "Distribution spec(s), e.g. normal:0:1.5, laplace:0:1.5, rayleigh:1, mixture")
      ->delimiter(',')
      ->capture_default_str();
  aso_cmd->add_option("--against", aso.against, "Second distribution; switches to type II rates");
  aso_cmd->add_option("--n", aso.sizes, "Sample sizes")->delimiter(',')->capture_default_str();
  aso_cmd->add_option("--tau", aso.taus, "ASO thresholds on eps_min")->delimiter(',')->capture_default_str();
  aso_cmd->add_option("--p-threshold", aso.p_thresholds, "Significance levels for classical tests")
      ->delimiter(',')
      ->capture_default_str();
  aso_cmd->add_option("--trials", aso.trials, "Trials per cell (default 500 for ASO, 1000 otherwise)");
  aso_cmd->add_option("--alpha", aso.alpha, "ASO confidence level")->capture_default_str();
  aso_cmd->add_option("--bootstrap", aso.bootstrap, "ASO bootstrap iterations")->capture_default_str();
  aso_cmd->add_option("--dt", aso.dt, "Quantile integration step")->capture_default_str();
  aso_cmd->add_option("--resamples", aso.resamples, "Bootstrap / permutation test resamples")->capture_default_str();
  aso_cmd->add_option("--plot", aso.plot, "Also write an SVG line chart here");
  add_common(aso_cmd, aso.seed, aso.threads, aso.out);

  ConformalOptions conf;
  auto* conf_cmd = app.add_subcommand("conformal-eval", "Split vs kNN-weighted conformal on the synthetic model");
  conf_cmd->add_option("--vocab", conf.vocab, "Vocabulary size V")->capture_default_str();
  conf_cmd->add_option("--dim", conf.dim, "Latent dimension d")->capture_default_str();
  conf_cmd->add_option("--cal", conf.calibration, "Calibration steps")->capture_default_str();
  conf_cmd->add_option("--test", conf.test, "Test steps")->capture_default_str();
  conf_cmd->add_option("--alpha", conf.alpha, "Miscoverage level")->capture_default_str();
  conf_cmd->add_option("--score", conf.score, "simple or adaptive")->capture_default_str();
  conf_cmd->add_option("--k", conf.k, "Neighbours per step")->capture_default_str();
  conf_cmd->add_option("--metric", conf.metrics, "l2, ip, cos")->delimiter(',')->capture_default_str();
  conf_cmd->add_option("--tau", conf.tau, "RBF temperature (default: automatic per metric)");
  conf_cmd->add_option("--noise", conf.noise, "Noise levels as fractions of the latent std")
      ->delimiter(',')
      ->capture_default_str();
  conf_cmd->add_flag("--no-split", conf.no_split, "Skip the static split-conformal baseline");
  conf_cmd->add_flag("--search", conf.search, "Pick tau by hill climbing on held-out steps");
  conf_cmd->add_option("--tau-min", conf.tau_min, "Search lower bound");
  conf_cmd->add_option("--tau-max", conf.tau_max, "Search upper bound");
  conf_cmd->add_option("--eta", conf.eta, "Search step size")->capture_default_str();
  conf_cmd->add_option("--search-iters", conf.search_iterations, "Search updates")->capture_default_str();
  conf_cmd->add_option("--search-steps", conf.search_steps, "Held-out steps per coverage evaluation")
      ->capture_default_str();
  conf_cmd->add_option("--bins", conf.bins, "Set-size bins for SSC / ECG")->capture_default_str();
  conf_cmd->add_option("--model-temperature", conf.model_temperature, "Synthetic softmax temperature")
      ->capture_default_str();
  conf_cmd->add_option("--store", conf.store, "Use this UQDS file as the calibration store");
  conf_cmd->add_option("--save-store", conf.save_store, "Write the calibration store to this UQDS file");
  conf_cmd->add_option("--plot", conf.plot, "Also write an SVG bar chart here");
  add_common(conf_cmd, conf.seed, conf.threads, conf.out);

  DirichletOptions dir;
  auto* dir_cmd = app.add_subcommand("dirichlet-check", "Dirichlet closed forms against Monte Carlo");
  dir_cmd->add_option("--alpha", dir.alpha, "Single concentration vector (default: random cases)")->delimiter(',');
  dir_cmd->add_option("--reference", dir.reference, "KL reference for --alpha (default: all ones)")->delimiter(',');
  dir_cmd->add_option("--cases", dir.cases, "Random cases")->capture_default_str();
  dir_cmd->add_option("--k-max", dir.k_max, "Largest K for random cases")->capture_default_str();
  dir_cmd->add_option("--alpha-min", dir.alpha_min, "Lower bound of random concentrations")->capture_default_str();
  dir_cmd->add_option("--alpha-max", dir.alpha_max, "Upper bound of random concentrations")->capture_default_str();
  dir_cmd->add_option("--samples", dir.samples, "Monte Carlo draws per case")->capture_default_str();
  dir_cmd->add_option("--z-limit", dir.z_limit, "Largest acceptable |z|")->capture_default_str();
  add_common(dir_cmd, dir.seed, dir.threads, dir.out);

  auto* ds_cmd = app.add_subcommand("datastore", "Inspect and convert UQDS files");
  ds_cmd->require_subcommand(1);
  std::string ds_path;
  std::string ds_out;
  bool dump_csv = false;
  auto* info_cmd = ds_cmd->add_subcommand("info", "Header and score summary as JSON");
  info_cmd->add_option("file", ds_path, "UQDS file")->required();
  info_cmd->add_option("-o,--out", ds_out, "Output file (default stdout)");
  auto* dump_cmd = ds_cmd->add_subcommand("dump", "Records as CSV");
  dump_cmd->add_option("file", ds_path, "UQDS file")->required();
  dump_cmd->add_flag("--csv", dump_csv, "CSV output (the only format)");
  dump_cmd->add_option("-o,--out", ds_out, "Output file (default stdout)");
  auto* rebuild_cmd = ds_cmd->add_subcommand("rebuild", "UQDS file from a dump CSV");
  rebuild_cmd->add_option("csv", ds_path, "CSV produced by 'datastore dump --csv'")->required();
  rebuild_cmd->add_option("-o,--out", ds_out, "UQDS file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*aso_cmd) run_aso_sim(aso);
    if (*conf_cmd) run_conformal_eval(conf);
    if (*dir_cmd) run_dirichlet_check(dir);
    if (*info_cmd) run_datastore_info(ds_path, ds_out);
    if (*dump_cmd) {
      if (!dump_csv) usage_error("dump needs --csv");
      run_datastore_dump(ds_path, ds_out);
    }
    if (*rebuild_cmd) run_datastore_rebuild(ds_path, ds_out);
  } catch (const CliError& e) {
    const json error = {{"error", {{"status", e.status}, {"message", e.what()}}}};
    std::cerr << error.dump() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    const json error = {{"error", {{"status", "internal error"}, {"message", e.what()}}}};
    std::cerr << error.dump() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
