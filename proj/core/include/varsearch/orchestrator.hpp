#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "varsearch/costmodel.hpp"
#include "varsearch/generator.hpp"
#include "varsearch/reward.hpp"
#include "varsearch/schedule.hpp"
#include "varsearch/types.hpp"

namespace varsearch {

enum class Strategy { kRaw, kBon, kIs, kTtsvar };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view text);

enum class EventKind { kCluster, kResample, kTruncate };

std::string_view to_string(EventKind kind);

/// One batch reduction from b_i to b_{i+1} after scale i.
struct SelectionRecord {
  std::size_t scale = 0;
  EventKind kind = EventKind::kTruncate;
  std::size_t source_size = 0;
  std::size_t target_size = 0;
  std::vector<std::size_t> selected;  // parent slot of each new slot
  // Resampling only.
  std::vector<double> scores;
  std::vector<double> log_potentials;
  std::vector<double> weights;
  // Clustering only.
  std::vector<std::size_t> assignments;
  double wcss = 0.0;
};

struct FinalCandidate {
  std::size_t slot = 0;
  Image image;
  double reward = 0.0;       // reward model at the final scale
  double true_reward = 0.0;  // noise-free -MSE
  std::vector<double> reward_history;
  std::vector<std::size_t> lineage;
  std::vector<StreamSeed> stream_seeds;
  std::uint64_t image_hash = 0;
};

struct StrategyRun {
  Strategy strategy = Strategy::kTtsvar;
  SearchConfig config;
  BatchSchedule batch{std::vector<std::size_t>{1, 1}};
  std::vector<FinalCandidate> finals;
  std::size_t selected = 0;
  std::vector<SelectionRecord> events;
  CostReport cost;
  std::size_t decode_calls = 0;
  std::size_t reward_calls = 0;

  const FinalCandidate& selected_candidate() const { return finals.at(selected); }
  double selected_true_reward() const { return selected_candidate().true_reward; }
};

struct RunOptions {
  std::size_t workers = 1;
  ModelDims dims;
  /// Decode and score every candidate at every scale (full-width
  /// consistency runs). Selection events are unaffected.
  bool score_all_scales = false;
};

/// Scales at which candidates are decoded and scored in addition to the
/// resampling scales themselves: every scale from min(S_r) on for MAX and
/// SUM, and scale i-1 for each resampling scale i under DIFF.
std::set<std::size_t> scoring_scales(const SearchConfig& config, std::size_t scales);

/// Coarse-to-fine path search: generate, then cluster at S_c, resample at
/// S_r, truncate elsewhere when the batch shrinks. The returned `selected`
/// is the final candidate with the highest reward-model score.
StrategyRun run_ttsvar(const SearchConfig& config, const BatchSchedule& batch,
                       const GeneratorInterface& generator, const RewardInterface& reward,
                       const ToyPrompt& prompt, const RunOptions& options = {});

/// N independent full-length paths; argmax final reward, ties to the lowest
/// index.
StrategyRun run_bon(std::size_t n, const SearchConfig& config, const GeneratorInterface& generator,
                    const RewardInterface& reward, const ToyPrompt& prompt,
                    const RunOptions& options = {});

/// N independent paths; one draw from softmax(lambda * final rewards).
StrategyRun run_is(std::size_t n, double lambda, const SearchConfig& config,
                   const GeneratorInterface& generator, const RewardInterface& reward,
                   const ToyPrompt& prompt, const RunOptions& options = {});

/// Single path, no search.
StrategyRun run_raw(const SearchConfig& config, const GeneratorInterface& generator,
                    const RewardInterface& reward, const ToyPrompt& prompt,
                    const RunOptions& options = {});

/// Regenerates one path from its per-scale stream seeds.
CandidatePath replay_path(const GeneratorInterface& generator, std::span<const StreamSeed> seeds);
Image replay_final_image(const GeneratorInterface& generator, std::span<const StreamSeed> seeds);

}  // namespace varsearch
