#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "varsearch/experiment.hpp"
#include "varsearch/orchestrator.hpp"
#include "varsearch/record.hpp"
#include "varsearch/stats.hpp"

namespace varsearch {

/// Runs replicates 0..count-1 of `strategy`, spreading replicates over
/// `workers` threads (each run itself single-threaded). Output order is by
/// replicate.
std::vector<StrategyRun> run_replicates(const ExperimentConfig& config, Strategy strategy,
                                        std::size_t count, std::size_t workers = 1);

/// Ground-truth reward of each run's selected candidate.
std::vector<double> selected_true_rewards(std::span<const StrategyRun> runs);

/// n-candidate runs with no selection, every candidate scored at every scale.
std::vector<StrategyRun> full_width_runs(const ExperimentConfig& config, std::size_t n,
                                         std::size_t count, std::size_t workers = 1);

struct ConsistencyCurve {
  std::vector<double> per_scale;  // index k-1
  std::size_t replicates = 0;
  std::size_t candidate_count = 0;
};

/// Fraction of runs where the potential argmax at scale k picks the same
/// candidate as the final-reward argmax (ties: lowest index).
ConsistencyCurve consistency(std::span<const StrategyRun> runs, const PotentialSpec& spec);

/// Columns: scale,consistency,err (binomial standard error).
void write_consistency_csv(std::ostream& out, const ConsistencyCurve& curve);

enum class SweepAxis { kResamplingScales, kClusteringScales, kPotential, kLambda, kExtractor, kN };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view text);
/// Config key an axis value is written to.
std::string_view sweep_key(SweepAxis axis);

struct SweepRow {
  std::string value;
  std::size_t replicates = 0;
  ConfidenceInterval reward;  // selected true reward
  double mean_events_cluster = 0.0;
  double mean_events_resample = 0.0;
  double mean_events_truncate = 0.0;
  std::vector<double> samples;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::kLambda;
  Strategy strategy = Strategy::kTtsvar;
  std::vector<SweepRow> rows;
};

/// One batch of `base.replicates` runs of base.strategy per value.
SweepTable sweep(SweepAxis axis, std::span<const std::string> values, const ExperimentConfig& base,
                 std::size_t workers = 1);

/// Columns: axis,value,strategy,replicates,mean,ci_low,ci_high,cluster_events,
/// resample_events,truncate_events
void write_sweep_csv(std::ostream& out, const SweepTable& table);

struct GroupSummary {
  std::string label;  // strategy plus distinguishing config
  std::size_t records = 0;
  ConfidenceInterval true_reward;
  ConfidenceInterval reward;
  std::vector<std::size_t> replicates;
  std::vector<double> true_rewards;
};

struct PairedComparison {
  std::string a;
  std::string b;
  std::size_t pairs = 0;
  TTestResult paired;
  TTestResult welch;
};

struct RecordSummary {
  std::vector<GroupSummary> groups;
  std::vector<PairedComparison> comparisons;  // every ordered pair a < b by label
};

/// Groups records by strategy and search settings; pairs groups on replicate
/// index. Throws std::invalid_argument on empty input.
RecordSummary summarize(std::span<const RunRecord> records, std::uint64_t seed = 0);
RecordSummary summarize_files(std::span<const std::filesystem::path> files,
                              std::uint64_t seed = 0);

void write_summary_csv(std::ostream& out, const RecordSummary& summary);
void write_paired_csv(std::ostream& out, const RecordSummary& summary);

}  // namespace varsearch
