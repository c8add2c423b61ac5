#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "varsearch/generator.hpp"
#include "varsearch/rng.hpp"
#include "varsearch/tensor.hpp"
#include "varsearch/types.hpp"

namespace varsearch {

/// Where a score is being taken. `noise_stream` is only consulted by reward
/// models configured with scoring noise.
struct ScoreContext {
  std::size_t scale = 0;
  std::optional<StreamSeed> noise_stream;
};

class RewardInterface {
 public:
  virtual ~RewardInterface() = default;
  virtual double score(const Image& image, const ToyPrompt& prompt,
                       const ScoreContext& context) const = 0;
};

/// -MSE against the prompt target, optionally plus N(0, noise_by_scale[k-1]^2)
/// to model raters that cannot judge early intermediates.
class ToyReward final : public RewardInterface {
 public:
  ToyReward() = default;
  explicit ToyReward(std::vector<double> noise_by_scale);

  double score(const Image& image, const ToyPrompt& prompt,
               const ScoreContext& context) const override;

  /// Noise-free -MSE.
  static double ground_truth(const Image& image, const ToyPrompt& prompt);

  const std::vector<double>& noise_by_scale() const { return noise_by_scale_; }

 private:
  std::vector<double> noise_by_scale_;
};

/// Min-max normalizes each batch of scores to [0, 1] and averages them
/// element-wise; a constant batch normalizes to 0.5.
std::vector<double> normalized_average(std::span<const double> a, std::span<const double> b);

/// lambda * functional(history): VALUE r_k, DIFF r_k - r_{k-1} (VALUE when
/// only one score exists), MAX max_i r_i, SUM sum_i r_i. The potential itself
/// is exp() of this; exponentiation is deferred to resample_weights.
double log_potential(std::span<const double> history, const PotentialSpec& spec);

/// Softmax with max-subtraction.
std::vector<double> resample_weights(std::span<const double> log_potentials);

struct PotentialResult {
  std::vector<double> raw_scores;
  std::vector<double> log_potentials;
  std::vector<double> weights;
};

/// Potentials and weights for a batch of reward histories (one per
/// candidate, most recent score last).
PotentialResult compute_potentials(std::span<const std::vector<double>> histories,
                                   const PotentialSpec& spec);

/// `count` i.i.d. categorical draws (with replacement) by inverse CDF.
std::vector<std::size_t> multinomial_select(std::span<const double> weights, std::size_t count,
                                            Rng& rng);

/// Single draw from softmax(lambda * finals).
std::size_t importance_sampling_baseline(std::span<const double> finals, double lambda, Rng& rng);

/// Index of the largest value; ties resolve to the lowest index.
std::size_t argmax_lowest(std::span<const double> values);

}  // namespace varsearch
