#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "varsearch/experiment.hpp"
#include "varsearch/orchestrator.hpp"

namespace varsearch {

struct RecordedFinal {
  std::size_t slot = 0;
  double reward = 0.0;
  double true_reward = 0.0;
  std::uint64_t image_hash = 0;
  std::vector<std::size_t> lineage;
  std::vector<StreamSeed> stream_seeds;
};

/// What a run-record file holds, minus per-event detail.
struct RunRecord {
  ExperimentConfig config;  // config.strategy is the strategy that ran
  std::size_t replicate = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::size_t> batch;
  std::size_t event_count = 0;
  std::vector<RecordedFinal> finals;
  std::size_t selected = 0;

  const RecordedFinal& selected_final() const { return finals.at(selected); }
};

/// Serialized record text. Contains no host- or worker-dependent fields, so
/// equal inputs give equal bytes.
std::string render_record(const ExperimentConfig& config, std::size_t replicate,
                          const StrategyRun& run);

/// Writes to a sibling temporary file and renames it into place.
void write_record(const std::filesystem::path& path, const ExperimentConfig& config,
                  std::size_t replicate, const StrategyRun& run);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

RunRecord parse_record(const std::string& text);
RunRecord read_record(const std::filesystem::path& path);

/// Regenerates final candidate `slot` of a record from its stream seeds.
Image replay_record(const RunRecord& record, std::size_t slot);

}  // namespace varsearch
