#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "varsearch/rng.hpp"
#include "varsearch/schedule.hpp"
#include "varsearch/tensor.hpp"

namespace varsearch {

/// A search configuration that cannot be executed against its schedule.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PotentialKind { kValue, kDiff, kMax, kSum };

std::string_view to_string(PotentialKind kind);
PotentialKind parse_potential_kind(std::string_view text);

/// Reward functional plus tilt temperature. Resampling weights are
/// proportional to exp(lambda * functional(history)).
struct PotentialSpec {
  PotentialKind kind = PotentialKind::kValue;
  double lambda = 10.0;

  void validate() const;
};

enum class ExtractorTag { kPatchPca, kPooled, kRawDownsample };

std::string_view to_string(ExtractorTag tag);
ExtractorTag parse_extractor_tag(std::string_view text);

/// Feature extractor selection for diversity clustering.
///
/// The image is split into grid_rows x grid_cols patches; each patch is
/// box-averaged to sub x sub cells, giving an embed_dim = sub^2 vector per
/// patch.
struct ExtractorVariant {
  ExtractorTag tag = ExtractorTag::kPatchPca;
  std::size_t grid_rows = 4;
  std::size_t grid_cols = 4;
  std::size_t sub = 2;

  std::size_t embed_dim() const { return sub * sub; }
  friend bool operator==(const ExtractorVariant&, const ExtractorVariant&) = default;
};

struct SearchConfig {
  std::set<std::size_t> clustering_scales;
  std::set<std::size_t> resampling_scales;
  PotentialSpec potential;
  ExtractorVariant extractor;
  std::uint64_t master_seed = 0;
  std::size_t replicates = 1;

  /// Throws ConfigError when the scale sets overlap, fall outside 1..K-1, or
  /// schedule a selection where the batch grows.
  void validate(const BatchSchedule& batch) const;
};

struct ScaledImage {
  std::size_t scale = 0;
  Image image;
};

struct ScaledReward {
  std::size_t scale = 0;
  double value = 0.0;
};

/// One search particle.
///
/// `accumulated` always equals the ascending-order sum of the upsampled
/// residuals; `stream_seeds[k-1]` is the seed that produced residual k, which
/// is all that is needed to replay the path.
struct CandidatePath {
  std::vector<Tensor3> residuals;
  Tensor3 accumulated;
  std::vector<ScaledImage> decoded;
  std::vector<ScaledReward> rewards;
  std::vector<std::size_t> lineage;
  std::vector<StreamSeed> stream_seeds;

  /// Number of scales generated so far.
  std::size_t depth() const { return residuals.size(); }

  /// Appends residual k = depth() + 1 and folds it into `accumulated`.
  void append_residual(Tensor3 residual, StreamSeed seed, const ScaleSchedule& schedule);

  std::vector<double> reward_values() const;
};

}  // namespace varsearch
