#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "varsearch/costmodel.hpp"
#include "varsearch/generator.hpp"
#include "varsearch/orchestrator.hpp"
#include "varsearch/reward.hpp"
#include "varsearch/schedule.hpp"
#include "varsearch/types.hpp"

namespace varsearch {

/// Default tilt temperature for the toy benchmark. Toy rewards are -MSE
/// (about 1e-3 in magnitude, about 1e-4 spread between candidates), so the
/// temperature is scaled up accordingly.
inline constexpr double kToyDefaultLambda = 2.0e4;

enum class TargetSource { kProcedural, kFile };

struct TargetSettings {
  TargetSource source = TargetSource::kProcedural;
  TargetPattern pattern = TargetPattern::kAuto;
  std::uint64_t seed = 0;
  std::filesystem::path file;
  std::size_t patch = 1;
};

/// Everything needed to reproduce one experiment. Optional members mean
/// "derive the default from the rest of the config".
struct ExperimentConfig {
  Strategy strategy = Strategy::kTtsvar;
  std::size_t n = 4;
  double lambda = kToyDefaultLambda;
  PotentialKind potential = PotentialKind::kValue;
  std::optional<std::set<std::size_t>> cluster_scales;
  std::optional<std::set<std::size_t>> resample_scales;
  ExtractorVariant extractor;
  std::uint64_t seed = 0;
  std::size_t replicates = 1;

  ScaleSchedule scales = toy_default_scales();
  std::optional<std::vector<std::size_t>> batch_base;

  double drift = 0.7;
  std::optional<std::vector<double>> noise;
  double gain = 1.0;

  std::vector<double> reward_noise;

  TargetSettings target;
  ModelDims model;

  /// Builds every component once; throws ConfigError on inconsistency.
  void validate() const;
};

/// Known keys in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one dotted key from text. Unknown keys and malformed values throw
/// ConfigError naming the key.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parses `key = value` lines; '#' starts a comment. Repeated keys are
/// rejected.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Canonical (key, value) listing; parse_config of its rendering yields an
/// equal configuration.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);
void write_config(std::ostream& out, const ExperimentConfig& config);

// Component builders.
BatchSchedule search_batch(const ExperimentConfig& config);
BatchSchedule strategy_batch(const ExperimentConfig& config);
std::uint64_t replicate_master_seed(std::uint64_t seed, std::size_t replicate);
SearchConfig search_config(const ExperimentConfig& config, std::size_t replicate);
ToyPrompt make_prompt(const ExperimentConfig& config, std::size_t replicate);
ToyGeneratorParams generator_params(const ExperimentConfig& config);
ToyReward make_reward(const ExperimentConfig& config);

/// Runs `config.strategy` for one replicate.
StrategyRun run_experiment(const ExperimentConfig& config, std::size_t replicate,
                           const RunOptions& options = {});

/// Runs an explicit strategy for one replicate, ignoring config.strategy.
StrategyRun run_experiment(const ExperimentConfig& config, Strategy strategy,
                           std::size_t replicate, const RunOptions& options = {});

}  // namespace varsearch
