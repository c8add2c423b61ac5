#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <vector>

namespace varsearch {

struct Resolution {
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::size_t tokens() const { return rows * cols; }
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

/// Token-grid resolution of every scale plus the per-token feature width.
///
/// Scales are 1-based in every public function (scale k refers to
/// resolutions()[k - 1]). Construction validates: at least two scales, the
/// first scale is 1x1, and both axes are nondecreasing.
class ScaleSchedule {
 public:
  ScaleSchedule(std::vector<Resolution> resolutions, std::size_t feature_dim);

  std::size_t scale_count() const { return resolutions_.size(); }
  std::size_t feature_dim() const { return feature_dim_; }
  const std::vector<Resolution>& resolutions() const { return resolutions_; }
  const Resolution& at(std::size_t scale) const;
  const Resolution& final_resolution() const { return resolutions_.back(); }

  std::size_t token_count(std::size_t scale) const { return at(scale).tokens(); }
  std::size_t cumulative_tokens(std::size_t scale) const;

  friend bool operator==(const ScaleSchedule&, const ScaleSchedule&) = default;

 private:
  std::vector<Resolution> resolutions_;
  std::size_t feature_dim_;
};

/// Per-scale live-candidate counts b_1..b_K (nonincreasing, all >= 1).
class BatchSchedule {
 public:
  BatchSchedule(std::vector<std::size_t> sizes, std::size_t multiplier = 1);

  /// sizes[i] = base[i] * multiplier.
  static BatchSchedule from_base(std::span<const std::size_t> base, std::size_t multiplier);
  static BatchSchedule constant(std::size_t scales, std::size_t size);

  std::size_t scale_count() const { return sizes_.size(); }
  std::size_t multiplier() const { return multiplier_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t at(std::size_t scale) const;

  friend bool operator==(const BatchSchedule&, const BatchSchedule&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::size_t multiplier_;
};

/// The 13-scale template {8,8,6,6,6,4,2,2,2,1,1,1,1}.
std::span<const std::size_t> batch_template();

/// Base template stretched to `scales` entries: target scale k samples the
/// template at the nearest normalized position (k-1)/(K-1), ties toward the
/// earlier entry. Identity at K = 13.
std::vector<std::size_t> stretched_template(std::size_t scales);

/// Adaptive descending schedule: stretched template times N.
BatchSchedule make_default_schedule(std::size_t scales, std::size_t multiplier);

/// Scales i in 1..K-1 where b_{i+1} < b_i.
std::vector<std::size_t> descent_scales(const BatchSchedule& batch);

/// Default split of the descent scales: the earlier half clusters, the later
/// half resamples. On the 13-scale template this yields {2,5} and {6,9}.
struct DefaultSearchScales {
  std::set<std::size_t> clustering;
  std::set<std::size_t> resampling;
};
DefaultSearchScales default_search_scales(const BatchSchedule& batch);

/// Square ladders used by presets.
ScaleSchedule toy_default_scales();       // 1,2,4,8,16,32 ; d = 4
ScaleSchedule infinity_like_scales();     // 1,2,4,6,8,12,16,20,24,32,40,48,64 ; d = 4
ScaleSchedule square_ladder(std::span<const std::size_t> sides, std::size_t feature_dim);

}  // namespace varsearch
