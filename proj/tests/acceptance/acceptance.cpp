// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.
// All seeds are fixed here and were not tuned against the outcomes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dirichlet_oracle.hpp"
#include "oracles.hpp"
#include "run_command.hpp"
#include "uqkit/calibration_metrics.hpp"
#include "uqkit/conformal.hpp"
#include "uqkit/conformal_study.hpp"
#include "uqkit/datastore.hpp"
#include "uqkit/dirichlet.hpp"
#include "uqkit/error_sim.hpp"
#include "uqkit/rng.hpp"

namespace {

using namespace uqkit;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

void note(Outcome& o, bool ok, const std::string& text) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += text + (ok ? "" : " [!]");
}

TestSpec aso_spec(double tau) {
  TestSpec s;
  s.kind = TestKind::kAso;
  s.threshold = tau;
  return s;
}

TestSpec p_spec(TestKind kind) {
  TestSpec s;
  s.kind = kind;
  s.threshold = 0.05;
  return s;
}

Outcome aso_type_one() {
  Outcome o;
  const Normal dist{0.0, 1.5};
  for (std::size_t n : {5, 10, 15, 20}) {
    const auto rows = rate_sweep(aso_spec(0.2), dist, nullptr, n, 500, {0.05, 0.2}, 7);
    note(o, rows[1].rate <= 0.06, fmt("n=%.0f tau=.2 rate=%.3f", double(n), rows[1].rate));
    if (n == 5) note(o, std::fabs(rows[0].rate - 0.020) <= 0.03, fmt("n=5 tau=.05 rate=%.3f (0.020)", rows[0].rate));
    if (n == 10) note(o, std::fabs(rows[1].rate - 0.038) <= 0.03, fmt("n=10 tau=.2 vs 0.038: %.3f", rows[1].rate));
  }
  return o;
}

Outcome classic_type_one() {
  Outcome o;
  for (auto kind : {TestKind::kStudentT, TestKind::kBootstrap, TestKind::kPermutation, TestKind::kWilcoxon,
                    TestKind::kMannWhitney}) {
    const auto r = type1_rate(p_spec(kind), Normal{0.0, 1.5}, 20, 1000, 11);
    note(o, std::fabs(r.rate - 0.05) <= 0.02, std::string(to_string(kind)) + fmt("=%.3f", r.rate));
  }
  return o;
}

Outcome aso_type_two() {
  Outcome o;
  const Normal better{0.5, 1.5};
  const Normal worse{0.0, 1.5};
  const auto t = type2_rate(p_spec(TestKind::kStudentT), better, worse, 20, 1000, 13);
  note(o, std::fabs(t.rate - 0.732) <= 0.05, fmt("student-t=%.3f (0.732)", t.rate));
  const auto a = type2_rate(aso_spec(0.05), better, worse, 20, 500, 13);
  note(o, std::fabs(a.rate - 0.976) <= 0.03, fmt("aso tau=.05=%.3f (0.976)", a.rate));
  return o;
}

Outcome split_coverage() {
  Outcome o;
  ConformalStudyConfig c;
  c.metrics.clear();
  c.seed = 17;
  const auto r = run_conformal_study(c);
  const double cov = r.records.at(0).coverage;
  note(o, cov >= 0.885 && cov <= 0.925, fmt("coverage=%.4f", cov));
  return o;
}

Outcome exchangeable_reduction() {
  Outcome o;
  Rng rng(19);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(500);
    std::vector<double> scores(n);
    for (auto& s : scores) s = trial % 2 ? rng.uniform() : std::round(rng.uniform() * 20) / 20;
    const double alpha = rng.uniform(0.01, 0.5);
    if (!(weighted_quantile({scores, std::vector<double>(n, 1.0)}, alpha) == split_quantile(scores, alpha))) {
      ++mismatches;
    }
  }
  note(o, mismatches == 0, fmt("%.0f mismatches in 1000", mismatches));
  return o;
}

Outcome noise_robustness() {
  Outcome o;
  for (std::uint64_t seed : {101, 102, 103}) {
    ConformalStudyConfig c;
    c.noise_levels = {0.0, 0.05, 0.1};
    c.seed = seed;
    const auto r = run_conformal_study(c);
    // Split records come first, then kNN, noise ascending within each.
    const auto& split_hi = r.records[2];
    const auto& k0 = r.records[3];
    const auto& k1 = r.records[4];
    const auto& k2 = r.records[5];
    const bool sizes = k0.mean_set_size <= k1.mean_set_size && k1.mean_set_size <= k2.mean_set_size;
    const bool cover = k2.coverage >= split_hi.coverage;
    note(o, sizes && cover,
         "seed " + std::to_string(seed) +
             fmt(" size %.2f/%.2f/%.2f", k0.mean_set_size, k1.mean_set_size, k2.mean_set_size) +
             fmt(" cov knn=%.4f split=%.4f", k2.coverage, split_hi.coverage));
  }
  return o;
}

Outcome dirichlet_closed_forms() {
  Outcome o;
  Rng rng(23);
  std::mt19937_64 engine(29);
  double worst_z = 0;
  double worst_identity = 0;
  for (int c = 0; c < 20; ++c) {
    const std::size_t k = 2 + rng.below(7);
    std::vector<double> alpha(k);
    std::vector<double> reference(k);
    for (auto& a : alpha) a = rng.uniform(0.2, 10);
    for (auto& a : reference) a = rng.uniform(0.2, 10);
    const DirichletParams d(alpha);
    const auto e = oracle::estimate_dirichlet(alpha, reference, 100000, engine);
    auto z = [&](double closed, const oracle::Moments& m) {
      worst_z = std::max(worst_z, std::fabs(m.mean - closed) / m.se());
    };
    const auto m = mean(d);
    for (std::size_t j = 0; j < k; ++j) {
      z(m[j], e.mean[j]);
      z(log_expectation(d, j), e.log_expectation[j]);
    }
    z(entropy(d), e.entropy);
    z(expected_entropy(d), e.expected_entropy);
    z(kl(d, DirichletParams(reference)), e.kl);
    // MI = H[E pi] - E[H(pi)]; only the second term is random.
    oracle::Moments mi = e.expected_entropy;
    mi.mean = predictive_entropy(m) - e.expected_entropy.mean;
    z(mutual_information(d), mi);
    worst_identity = std::max(worst_identity,
                              std::fabs(predictive_entropy(m) - expected_entropy(d) - mutual_information(d)));
  }
  note(o, worst_z <= 4.0, fmt("max|z|=%.2f", worst_z));
  note(o, worst_identity <= 1e-10, fmt("identity err=%.1e", worst_identity));
  return o;
}

Outcome metric_oracles() {
  Outcome o;
  Rng rng(31);
  double ece_err = 0, cov_err = 0, auroc_err = 0, tau_err = 0, mi_err = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 5 + rng.below(60);
    std::vector<double> conf(n);
    std::vector<int> correct(n);
    for (std::size_t i = 0; i < n; ++i) {
      conf[i] = t % 3 ? rng.uniform() : std::round(rng.uniform() * 10) / 10;
      correct[i] = rng.uniform() < conf[i];
    }
    ece_err = std::max(ece_err, std::fabs(ece(conf, correct, 10) - oracle::ece(conf, correct, 10)));

    const std::size_t vocab = 2 + rng.below(100);
    std::vector<std::size_t> sizes(n);
    for (auto& s : sizes) s = rng.below(vocab + 1);
    const auto got = coverage_report(sizes, correct, 0.1, vocab, 15);
    const auto want = oracle::coverage(sizes, correct, 0.1, vocab, 15);
    cov_err = std::max({cov_err, std::fabs(got.ecg - want.ecg), std::fabs(got.ssc - want.ssc)});

    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < 2 ? static_cast<int>(i) : static_cast<int>(rng.below(2));
    std::vector<double> scores(n);
    for (auto& s : scores) s = std::round(rng.uniform() * 12);
    auroc_err = std::max(auroc_err, std::fabs(auroc(scores, labels) - oracle::auroc(scores, labels)));

    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = i < 2 ? double(i) : std::round(rng.uniform() * 5);
      y[i] = i < 2 ? double(i) : std::round(rng.uniform() * 5);
    }
    tau_err = std::max(tau_err, std::fabs(kendall_tau_b(x, y) - oracle::kendall_tau_b(x, y)));

    std::vector<ProbVector> rows;
    std::vector<std::vector<double>> raw;
    const std::size_t classes = 2 + rng.below(8);
    for (int b = 0; b < 8; ++b) {
      std::vector<double> logits(classes);
      for (auto& z : logits) z = rng.normal(0, 2);
      rows.push_back(ProbVector::softmax(logits));
      raw.emplace_back(rows.back().probs().begin(), rows.back().probs().end());
    }
    mi_err = std::max(mi_err, std::fabs(bma_mutual_information(rows) - oracle::mutual_information(raw)));
  }
  note(o, ece_err <= 1e-12, fmt("ece %.1e", ece_err));
  note(o, cov_err <= 1e-12, fmt("ecg/ssc %.1e", cov_err));
  note(o, auroc_err <= 1e-12, fmt("auroc %.1e", auroc_err));
  note(o, tau_err <= 1e-12, fmt("tau-b %.1e", tau_err));
  note(o, mi_err <= 1e-12, fmt("mi %.1e", mi_err));
  return o;
}

Outcome datastore_correctness() {
  Outcome o;
  Rng rng(37);
  const std::size_t dim = 16;
  Datastore store(dim);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> z(dim);
    for (auto& x : z) x = rng.normal();
    store.add(z, rng.uniform());
  }
  std::vector<std::vector<float>> records;
  for (std::size_t i = 0; i < store.size(); ++i) records.emplace_back(store.latent(i).begin(), store.latent(i).end());
  int mismatches = 0;
  for (int metric = 0; metric < 3; ++metric) {
    for (int q = 0; q < 100; ++q) {
      std::vector<double> z(dim);
      for (auto& x : z) x = rng.normal();
      const auto got = store.query(z, 10, static_cast<Metric>(metric));
      const auto want = oracle::linear_scan(records, z, 10, metric);
      for (std::size_t j = 0; j < want.size(); ++j) {
        mismatches += got[j].index != want[j].first || std::fabs(got[j].key - want[j].second) > 1e-12;
      }
    }
  }
  note(o, mismatches == 0, fmt("exact vs scan mismatches=%.0f", mismatches));

  const auto bytes = store.serialize();
  const auto path = (std::filesystem::temp_directory_path() / "uqkit_acceptance.uqds").string();
  store.save(path);
  const bool identical = Datastore::load(path).serialize() == bytes && read_file(path).size() == bytes.size();
  std::filesystem::remove(path);
  note(o, identical, "uqds round trip");

  const std::size_t ivf_dim = 8;
  Datastore big(ivf_dim);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> z(ivf_dim);
    for (auto& x : z) x = rng.uniform();
    big.add(z, 0.0);
  }
  Rng build(41);
  big.build_ivf(64, build);
  std::size_t found = 0;
  const int queries = 500;
  for (int q = 0; q < queries; ++q) {
    std::vector<double> z(ivf_dim);
    for (auto& x : z) x = rng.uniform();
    std::set<std::size_t> truth;
    for (const auto& n : big.query(z, 10, Metric::kL2)) truth.insert(n.index);
    for (const auto& n : big.query_ivf(z, 10, Metric::kL2, 16)) found += truth.count(n.index);
  }
  const double recall = static_cast<double>(found) / (10.0 * queries);
  note(o, recall >= 0.95, fmt("ivf recall@10=%.4f", recall));
  return o;
}

Outcome cli_determinism() {
  Outcome o;
  const std::string cli = UQKIT_CLI_PATH;
  const auto dir = std::filesystem::temp_directory_path() / "uqkit_acceptance_cli";
  std::filesystem::create_directories(dir);
  const std::string store = (dir / "cal.uqds").string();
  const std::string csv = (dir / "cal.csv").string();

  const std::vector<std::pair<std::string, std::string>> commands{
      {"aso-sim", "aso-sim --test aso,student-t,bootstrap,permutation,wilcoxon,mann-whitney --n 5,10 --trials 100 "
                  "--bootstrap 200 --resamples 200 --seed 5"},
      {"conformal-eval", "conformal-eval --cal 600 --test 400 --metric l2,ip,cos --noise 0,0.1 --search "
                         "--search-steps 100 --search-iters 5 --seed 5 --save-store " + store},
      {"dirichlet-check", "dirichlet-check --samples 20000 --seed 5"},
      {"datastore info", "datastore info " + store},
      {"datastore dump", "datastore dump --csv " + store},
  };
  for (const auto& [name, args] : commands) {
    const auto one = run_command("UQKIT_THREADS=1 " + cli + " " + args);
    const auto again = run_command("UQKIT_THREADS=1 " + cli + " " + args);
    const auto eight = run_command("env -u UQKIT_THREADS " + cli + " " + args + " --threads 8");
    const bool ok = one.exit_code == 0 && again.exit_code == 0 && !one.out.empty() && one.out == again.out &&
                    (name.rfind("datastore", 0) == 0 || (eight.exit_code == 0 && eight.out == one.out));
    note(o, ok, name);
  }
  std::string rebuilt[2];
  for (int i = 0; i < 2; ++i) {
    rebuilt[i] = (dir / ("rebuilt" + std::to_string(i) + ".uqds")).string();
    run_command(cli + " datastore dump --csv " + store + " --out " + csv);
    run_command(cli + " datastore rebuild " + csv + " --out " + rebuilt[i]);
  }
  const bool rebuild_ok = read_file(rebuilt[0]) == read_file(rebuilt[1]) && read_file(rebuilt[0]) == read_file(store);
  note(o, rebuild_ok, "datastore rebuild");
  std::filesystem::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"ASO type I reproduction", aso_type_one},
      {"classical-test type I sanity", classic_type_one},
      {"ASO type II spot check", aso_type_two},
      {"split-conformal coverage", split_coverage},
      {"exchangeable-reduction exactness", exchangeable_reduction},
      {"noise-robustness property", noise_robustness},
      {"Dirichlet closed forms", dirichlet_closed_forms},
      {"metric oracle equivalence", metric_oracles},
      {"datastore correctness", datastore_correctness},
      {"CLI determinism", cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), seconds,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
