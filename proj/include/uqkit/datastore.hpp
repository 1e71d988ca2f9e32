#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqkit/rng.hpp"

namespace uqkit {

/// Neighbour ranking. kL2 ranks by ascending squared Euclidean distance;
/// kInnerProduct (divided by sqrt(dim)) and kCosine rank by descending
/// similarity.
enum class Metric { kL2, kInnerProduct, kCosine };

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);

/// True when a larger key is a better match.
constexpr bool is_similarity(Metric metric) { return metric != Metric::kL2; }

struct Neighbor {
  std::size_t index = 0;
  double key = 0.0;  // squared distance or similarity, depending on the metric
  double score = 0.0;
};

inline constexpr std::uint32_t kUqdsVersion = 1;

/// (latent, score) calibration records with exact and inverted-file k-NN
/// search. Latents are held at float precision; query vectors are rounded to
/// float before comparison so a stored latent finds itself at distance 0.
///
/// Const member functions may be called concurrently; add() and build_ivf()
/// need exclusive access.
class Datastore {
 public:
  explicit Datastore(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return scores_.size(); }
  bool empty() const { return scores_.empty(); }

  void add(std::span<const double> latent, double score);
  void add(std::span<const float> latent, double score);

  std::span<const float> latent(std::size_t i) const;
  double score(std::size_t i) const { return scores_.at(i); }
  std::span<const double> scores() const { return scores_; }

  /// The min(k, size()) best records, best first, ties broken by index.
  std::vector<Neighbor> query(std::span<const double> latent, std::size_t k,
                              Metric metric) const;

  /// Coarse k-means (25 Lloyd iterations from `num_clusters` distinct
  /// records chosen by `rng`). Records added later join their nearest list.
  void build_ivf(std::size_t num_clusters, Rng& rng);
  bool has_ivf() const { return !lists_.empty(); }
  std::size_t num_clusters() const { return lists_.size(); }

  /// Searches the lists of the `nprobe` centroids ranking best under
  /// `metric`. Requires build_ivf().
  std::vector<Neighbor> query_ivf(std::span<const double> latent, std::size_t k,
                                  Metric metric, std::size_t nprobe) const;

  /// UQDS bytes: "UQDS", u32 version, u32 dim, u64 count, then per record
  /// dim x f32 latent and one f64 score, all little-endian. The IVF index is
  /// not persisted.
  std::vector<std::uint8_t> serialize() const;
  static Datastore deserialize(std::span<const std::uint8_t> bytes);

  void save(const std::string& path) const;
  static Datastore load(const std::string& path);

 private:
  std::vector<float> to_query(std::span<const double> latent) const;
  double key(std::span<const float> query, double query_norm, std::size_t record,
             Metric metric) const;
  std::vector<Neighbor> rank(std::span<const float> query, std::span<const std::size_t> candidates,
                             std::size_t k, Metric metric) const;
  std::size_t nearest_centroid(std::span<const float> latent) const;

  std::size_t dim_;
  std::vector<float> latents_;
  std::vector<double> scores_;
  std::vector<double> norms_;
  std::vector<double> centroids_;
  std::vector<std::vector<std::size_t>> lists_;
};

}  // namespace uqkit
