#include "uqkit/datastore.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "uqkit/error.hpp"

namespace uqkit {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'U', 'Q', 'D', 'S'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8;
constexpr int kKMeansIterations = 25;

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

template <class T>
T get_le(const std::uint8_t* in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(in[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

double norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

bool better(Metric metric, double lhs, double rhs) {
  return is_similarity(metric) ? lhs > rhs : lhs < rhs;
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kL2: return "l2";
    case Metric::kInnerProduct: return "ip";
    case Metric::kCosine: return "cos";
  }
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "l2") return Metric::kL2;
  if (name == "ip") return Metric::kInnerProduct;
  if (name == "cos" || name == "cosine") return Metric::kCosine;
  return std::nullopt;
}

Datastore::Datastore(std::size_t dim) : dim_(dim) {
  require(dim >= 1, "datastore dimension must be at least 1");
  require(dim <= 0xffffffffu, "datastore dimension too large");
}

void Datastore::add(std::span<const double> latent, double score) {
  std::vector<float> rounded(latent.begin(), latent.end());
  add(std::span<const float>(rounded), score);
}

void Datastore::add(std::span<const float> latent, double score) {
  require(latent.size() == dim_, "latent dimension does not match datastore", ErrorCode::kData);
  require(std::isfinite(score), "record score must be finite", ErrorCode::kData);
  for (float x : latent) require(std::isfinite(x), "record latent must be finite", ErrorCode::kData);
  latents_.insert(latents_.end(), latent.begin(), latent.end());
  scores_.push_back(score);
  norms_.push_back(norm(latent));
  if (has_ivf()) lists_[nearest_centroid(latent)].push_back(scores_.size() - 1);
}

std::span<const float> Datastore::latent(std::size_t i) const {
  require(i < size(), "record index out of range");
  return {latents_.data() + i * dim_, dim_};
}

std::vector<float> Datastore::to_query(std::span<const double> latent) const {
  require(latent.size() == dim_, "query dimension does not match datastore", ErrorCode::kData);
  require(!empty(), "query on empty datastore", ErrorCode::kData);
  return {latent.begin(), latent.end()};
}

double Datastore::key(std::span<const float> query, double query_norm, std::size_t record,
                      Metric metric) const {
  const float* x = latents_.data() + record * dim_;
  double acc = 0.0;
  if (metric == Metric::kL2) {
    for (std::size_t j = 0; j < dim_; ++j) {
      const double d = static_cast<double>(query[j]) - static_cast<double>(x[j]);
      acc += d * d;
    }
    return acc;
  }
  for (std::size_t j = 0; j < dim_; ++j) acc += static_cast<double>(query[j]) * x[j];
  if (metric == Metric::kInnerProduct) return acc / std::sqrt(static_cast<double>(dim_));
  const double denominator = query_norm * norms_[record];
  return denominator > 0.0 ? acc / denominator : 0.0;
}

std::vector<Neighbor> Datastore::rank(std::span<const float> query,
                                      std::span<const std::size_t> candidates, std::size_t k,
                                      Metric metric) const {
  const double query_norm = norm(query);
  std::vector<Neighbor> all;
  all.reserve(candidates.size());
  for (std::size_t i : candidates) all.push_back({i, key(query, query_norm, i, metric), scores_[i]});
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    [metric](const Neighbor& a, const Neighbor& b) {
                      if (a.key != b.key) return better(metric, a.key, b.key);
                      return a.index < b.index;
                    });
  all.resize(keep);
  return all;
}

std::vector<Neighbor> Datastore::query(std::span<const double> latent, std::size_t k,
                                       Metric metric) const {
  const auto q = to_query(latent);
  std::vector<std::size_t> every(size());
  std::iota(every.begin(), every.end(), 0);
  return rank(q, every, k, metric);
}

std::size_t Datastore::nearest_centroid(std::span<const float> latent) const {
  std::size_t best = 0;
  double best_distance = INFINITY;
  for (std::size_t c = 0; c < lists_.size(); ++c) {
    const double* centroid = centroids_.data() + c * dim_;
    double d = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double diff = static_cast<double>(latent[j]) - centroid[j];
      d += diff * diff;
    }
    if (d < best_distance) {
      best_distance = d;
      best = c;
    }
  }
  return best;
}

void Datastore::build_ivf(std::size_t num_clusters, Rng& rng) {
  require(num_clusters >= 1, "number of clusters must be at least 1");
  require(size() >= num_clusters, "too few records for the requested number of clusters",
          ErrorCode::kData);
  const std::size_t n = size();

  // Distinct seed records via a partial Fisher-Yates shuffle.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < num_clusters; ++i) {
    std::swap(order[i], order[i + rng.below(n - i)]);
  }
  centroids_.assign(num_clusters * dim_, 0.0);
  for (std::size_t c = 0; c < num_clusters; ++c) {
    const auto seed = latent(order[c]);
    std::copy(seed.begin(), seed.end(), centroids_.begin() + static_cast<std::ptrdiff_t>(c * dim_));
  }
  lists_.assign(num_clusters, {});

  std::vector<std::size_t> assignment(n);
  for (int iteration = 0; iteration <= kKMeansIterations; ++iteration) {
    for (std::size_t i = 0; i < n; ++i) assignment[i] = nearest_centroid(latent(i));
    if (iteration == kKMeansIterations) break;
    std::vector<double> sums(num_clusters * dim_, 0.0);
    std::vector<std::size_t> counts(num_clusters, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = latent(i);
      double* sum = sums.data() + assignment[i] * dim_;
      for (std::size_t j = 0; j < dim_; ++j) sum[j] += x[j];
      ++counts[assignment[i]];
    }
    for (std::size_t c = 0; c < num_clusters; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t j = 0; j < dim_; ++j) {
        centroids_[c * dim_ + j] = sums[c * dim_ + j] / static_cast<double>(counts[c]);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) lists_[assignment[i]].push_back(i);
}

std::vector<Neighbor> Datastore::query_ivf(std::span<const double> latent, std::size_t k,
                                           Metric metric, std::size_t nprobe) const {
  require(has_ivf(), "inverted-file index has not been built");
  require(nprobe >= 1, "nprobe must be at least 1");
  const auto q = to_query(latent);
  const double query_norm = norm(q);

  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(lists_.size());
  for (std::size_t c = 0; c < lists_.size(); ++c) {
    const double* centroid = centroids_.data() + c * dim_;
    double dot = 0.0;
    double sq = 0.0;
    double centroid_sq = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double diff = q[j] - centroid[j];
      sq += diff * diff;
      dot += q[j] * centroid[j];
      centroid_sq += centroid[j] * centroid[j];
    }
    double k_c = sq;
    if (metric == Metric::kInnerProduct) k_c = dot;
    if (metric == Metric::kCosine) {
      const double denominator = query_norm * std::sqrt(centroid_sq);
      k_c = denominator > 0.0 ? dot / denominator : 0.0;
    }
    ranked.emplace_back(k_c, c);
  }
  const std::size_t probes = std::min(nprobe, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(probes), ranked.end(),
                    [metric](const auto& a, const auto& b) {
                      if (a.first != b.first) return better(metric, a.first, b.first);
                      return a.second < b.second;
                    });

  std::vector<std::size_t> candidates;
  for (std::size_t p = 0; p < probes; ++p) {
    const auto& list = lists_[ranked[p].second];
    candidates.insert(candidates.end(), list.begin(), list.end());
  }
  return rank(q, candidates, k, metric);
}

std::vector<std::uint8_t> Datastore::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + size() * (dim_ * 4 + 8));
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_le(out, kUqdsVersion);
  put_le(out, static_cast<std::uint32_t>(dim_));
  put_le(out, static_cast<std::uint64_t>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    for (float x : latent(i)) put_le(out, x);
    put_le(out, scores_[i]);
  }
  return out;
}

Datastore Datastore::deserialize(std::span<const std::uint8_t> bytes) {
  require(bytes.size() >= kHeaderBytes, "truncated header", ErrorCode::kFormat);
  require(std::equal(kMagic.begin(), kMagic.end(), bytes.begin()), "bad magic", ErrorCode::kFormat);
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kUqdsVersion) {
    throw Error(ErrorCode::kFormat, "unsupported version " + std::to_string(version));
  }
  const auto dim = get_le<std::uint32_t>(bytes.data() + 8);
  const auto count = get_le<std::uint64_t>(bytes.data() + 12);
  require(dim >= 1, "zero latent dimension", ErrorCode::kFormat);

  const std::uint64_t record_bytes = static_cast<std::uint64_t>(dim) * 4 + 8;
  const std::uint64_t body = bytes.size() - kHeaderBytes;
  require(count <= body / record_bytes, "truncated records", ErrorCode::kFormat);
  require(count * record_bytes == body, "trailing bytes after records", ErrorCode::kFormat);

  Datastore store(dim);
  store.latents_.reserve(static_cast<std::size_t>(count) * dim);
  std::vector<float> latent(dim);
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i) {
    for (auto& x : latent) {
      x = get_le<float>(p);
      p += 4;
    }
    const double score = get_le<double>(p);
    p += 8;
    store.add(std::span<const float>(latent), score);
  }
  return store;
}

void Datastore::save(const std::string& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

Datastore Datastore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "failed reading '" + path + "'");
  return deserialize(bytes);
}

}  // namespace uqkit
