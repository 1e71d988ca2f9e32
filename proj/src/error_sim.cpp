#include "uqkit/error_sim.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "format.hpp"
#include "uqkit/error.hpp"
#include "uqkit/parallel.hpp"

namespace uqkit {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<std::string_view> split_fields(std::string_view text) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    fields.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  return fields;
}

double parse_number(std::string_view field) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid number in distribution spec: '" + std::string(field) + "'");
  }
  return value;
}

std::string join(std::initializer_list<double> values) {
  std::string out;
  for (double v : values) {
    out += ':';
    out += detail::format_double(v);
  }
  return out;
}

double decision_statistic(const TestSpec& test, const Sample& a, const Sample& b, Rng& rng) {
  if (test.kind == TestKind::kAso) return aso(a, b, test.aso, rng).eps_min;
  return classic_test(test.kind, a, b, test.resamples, rng).p_value;
}

}  // namespace

NormalMixture default_mixture() {
  return NormalMixture{{{0.0, 1.5}, {-0.5, 0.25}}, {0.75, 0.25}};
}

void validate(const DistSpec& spec) {
  std::visit(Overloaded{
                 [](const Normal& d) {
                   require(std::isfinite(d.mean) && d.std > 0.0 && std::isfinite(d.std),
                           "normal std must be positive");
                 },
                 [](const NormalMixture& d) {
                   require(!d.components.empty() && d.components.size() == d.weights.size(),
                           "mixture needs one weight per component");
                   double total = 0.0;
                   for (std::size_t i = 0; i < d.weights.size(); ++i) {
                     require(d.weights[i] >= 0.0, "mixture weights must be non-negative");
                     require(std::isfinite(d.components[i].mean) && d.components[i].std > 0.0,
                             "mixture component std must be positive");
                     total += d.weights[i];
                   }
                   require(std::fabs(total - 1.0) <= 1e-12, "mixture weights must sum to 1");
                 },
                 [](const Laplace& d) {
                   require(std::isfinite(d.location) && d.scale > 0.0 && std::isfinite(d.scale),
                           "laplace scale must be positive");
                 },
                 [](const Rayleigh& d) {
                   require(d.scale > 0.0 && std::isfinite(d.scale),
                           "rayleigh scale must be positive");
                 },
             },
             spec);
}

DistSpec parse_dist(std::string_view text) {
  const auto fields = split_fields(text);
  const std::string_view name = fields.front();
  const std::size_t args = fields.size() - 1;
  DistSpec spec;
  if (name == "normal" && args == 2) {
    spec = Normal{parse_number(fields[1]), parse_number(fields[2])};
  } else if (name == "laplace" && args == 2) {
    spec = Laplace{parse_number(fields[1]), parse_number(fields[2])};
  } else if (name == "rayleigh" && args == 1) {
    spec = Rayleigh{parse_number(fields[1])};
  } else if (name == "mixture" && args == 0) {
    spec = default_mixture();
  } else if (name == "mixture" && args > 0 && args % 3 == 0) {
    NormalMixture mixture;
    for (std::size_t i = 1; i < fields.size(); i += 3) {
      mixture.weights.push_back(parse_number(fields[i]));
      mixture.components.push_back({parse_number(fields[i + 1]), parse_number(fields[i + 2])});
    }
    spec = std::move(mixture);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unrecognised distribution spec: '" + std::string(text) + "'");
  }
  validate(spec);
  return spec;
}

std::string to_string(const DistSpec& spec) {
  return std::visit(Overloaded{
                        [](const Normal& d) { return "normal" + join({d.mean, d.std}); },
                        [](const NormalMixture& d) {
                          std::string out = "mixture";
                          for (std::size_t i = 0; i < d.weights.size(); ++i) {
                            out += join({d.weights[i], d.components[i].mean, d.components[i].std});
                          }
                          return out;
                        },
                        [](const Laplace& d) { return "laplace" + join({d.location, d.scale}); },
                        [](const Rayleigh& d) { return "rayleigh" + join({d.scale}); },
                    },
                    spec);
}

Sample sample_dist(const DistSpec& spec, std::size_t n, Rng& rng) {
  require(n >= 1, "sample size must be at least 1");
  validate(spec);
  std::vector<double> values(n);
  std::visit(Overloaded{
                 [&](const Normal& d) {
                   for (auto& v : values) v = rng.normal(d.mean, d.std);
                 },
                 [&](const NormalMixture& d) {
                   for (auto& v : values) {
                     double u = rng.uniform();
                     std::size_t c = 0;
                     while (c + 1 < d.weights.size() && u >= d.weights[c]) u -= d.weights[c++];
                     v = rng.normal(d.components[c].mean, d.components[c].std);
                   }
                 },
                 [&](const Laplace& d) {
                   for (auto& v : values) {
                     const double u = rng.uniform() - 0.5;
                     v = d.location - d.scale * std::copysign(std::log1p(-2.0 * std::fabs(u)), u);
                   }
                 },
                 [&](const Rayleigh& d) {
                   for (auto& v : values) v = d.scale * std::sqrt(-2.0 * std::log1p(-rng.uniform()));
                 },
             },
             spec);
  return Sample(std::move(values));
}

std::vector<double> simulate_statistics(const TestSpec& test, const DistSpec& a,
                                        const DistSpec& b, std::size_t n,
                                        std::size_t trials, std::uint64_t seed,
                                        unsigned workers) {
  require(trials >= 1, "trials must be at least 1");
  require(n >= 1, "sample size must be at least 1");
  validate(a);
  validate(b);
  std::vector<double> statistics(trials);
  parallel_for(trials, workers, [&](std::size_t trial) {
    Rng rng(derive_seed(seed, trial));
    const Sample sample_a = sample_dist(a, n, rng);
    const Sample sample_b = sample_dist(b, n, rng);
    statistics[trial] = decision_statistic(test, sample_a, sample_b, rng);
  });
  return statistics;
}

double rejection_rate(const std::vector<double>& statistics, double threshold) {
  require(!statistics.empty(), "no trials");
  std::size_t rejected = 0;
  for (double s : statistics) rejected += s < threshold ? 1 : 0;
  return static_cast<double>(rejected) / static_cast<double>(statistics.size());
}

std::vector<ErrorRateReport> rate_sweep(const TestSpec& test, const DistSpec& a,
                                        const DistSpec* b, std::size_t n,
                                        std::size_t trials,
                                        const std::vector<double>& thresholds,
                                        std::uint64_t seed, unsigned workers) {
  require(!thresholds.empty(), "at least one threshold is required");
  const bool type2 = b != nullptr;
  const auto statistics = simulate_statistics(test, a, type2 ? *b : a, n, trials, seed, workers);
  std::vector<ErrorRateReport> reports;
  for (double threshold : thresholds) {
    ErrorRateReport report;
    report.test = test.kind;
    report.dist = type2 ? to_string(a) + "/" + to_string(*b) : to_string(a);
    report.type2 = type2;
    report.n = n;
    report.trials = trials;
    report.threshold = threshold;
    const double reject = rejection_rate(statistics, threshold);
    report.rate = type2 ? 1.0 - reject : reject;
    report.se = std::sqrt(report.rate * (1.0 - report.rate) / static_cast<double>(trials));
    report.seed = seed;
    reports.push_back(std::move(report));
  }
  return reports;
}

ErrorRateReport type1_rate(const TestSpec& test, const DistSpec& dist, std::size_t n,
                           std::size_t trials, std::uint64_t seed, unsigned workers) {
  return rate_sweep(test, dist, nullptr, n, trials, {test.threshold}, seed, workers).front();
}

ErrorRateReport type2_rate(const TestSpec& test, const DistSpec& a, const DistSpec& b,
                           std::size_t n, std::size_t trials, std::uint64_t seed,
                           unsigned workers) {
  return rate_sweep(test, a, &b, n, trials, {test.threshold}, seed, workers).front();
}

}  // namespace uqkit
