#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "varsearch/rng.hpp"
#include "varsearch/schedule.hpp"
#include "varsearch/tensor.hpp"
#include "varsearch/types.hpp"

namespace varsearch {

/// Scale-causal generator: residual k may depend only on residuals 1..k-1
/// of the context path.
class GeneratorInterface {
 public:
  virtual ~GeneratorInterface() = default;

  virtual const ScaleSchedule& schedule() const = 0;

  /// Residual map for `scale` (1-based), shaped (h_k, w_k, d).
  virtual Tensor3 sample_residual(const CandidatePath& context, std::size_t scale,
                                  Rng& rng) const = 0;

  /// Maps an accumulated (h, w, d) feature map to a pixel image.
  virtual Image decode(const Tensor3& accumulated) const = 0;
};

/// Sum of residuals, each nearest-upsampled to the final resolution, added in
/// ascending scale order starting from zeros.
Tensor3 accumulate(std::span<const Tensor3> residuals, const ScaleSchedule& schedule);

/// Stand-in for the text condition: the image the toy process is pulled
/// toward.
struct ToyPrompt {
  Image target;
  std::string label;
};

struct ToyGeneratorParams {
  std::vector<double> noise_scale;  // sigma_k per scale
  double drift = 0.7;               // alpha in (0, 1]
  double pixel_decoder_gain = 1.0;

  /// (0.5, 0.4, 0.3, 0.2, 0.1, 0.05) for six scales; otherwise log-linear
  /// from 0.5 down to 0.05.
  static std::vector<double> default_noise(std::size_t scales);
  static ToyGeneratorParams defaults(std::size_t scales);

  void validate(std::size_t scales) const;
};

/// Noisy contraction toward the prompt's target:
///   r_k = alpha * (down(target_feature, k) - down(f_{k-1}, k)) + sigma_k * z
/// with z i.i.d. standard normal. The target feature carries pixel / gain on
/// every channel, so decoding it reproduces the (patch-averaged) target.
class ToyGenerator final : public GeneratorInterface {
 public:
  ToyGenerator(ScaleSchedule schedule, ToyGeneratorParams params, ToyPrompt prompt);

  const ScaleSchedule& schedule() const override { return schedule_; }
  Tensor3 sample_residual(const CandidatePath& context, std::size_t scale,
                          Rng& rng) const override;
  Image decode(const Tensor3& accumulated) const override;

  const ToyPrompt& prompt() const { return prompt_; }
  const ToyGeneratorParams& params() const { return params_; }
  std::size_t patch() const { return patch_; }

  /// Target feature map at the final token resolution.
  const Tensor3& target_feature() const { return pyramid_.back(); }

 private:
  ScaleSchedule schedule_;
  ToyGeneratorParams params_;
  ToyPrompt prompt_;
  std::size_t patch_ = 1;
  std::vector<Tensor3> pyramid_;  // target feature downsampled to each scale
};

enum class TargetPattern { kAuto, kBlobs, kStripes, kChecker };

std::string_view to_string(TargetPattern pattern);
TargetPattern parse_target_pattern(std::string_view text);

/// Procedural target in [0, 1] keyed by seed. kAuto cycles
/// blobs/stripes/checker by seed % 3.
Image procedural_target(TargetPattern pattern, std::uint64_t seed, std::size_t rows,
                        std::size_t cols);

}  // namespace varsearch
