#include "varsearch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "varsearch/csv.hpp"
#include "varsearch/parallel.hpp"

namespace varsearch {

std::vector<StrategyRun> run_replicates(const ExperimentConfig& config, Strategy strategy,
                                        std::size_t count, std::size_t workers) {
  std::vector<StrategyRun> runs(count);
  parallel_for(count, workers,
               [&](std::size_t r) { runs[r] = run_experiment(config, strategy, r); });
  return runs;
}

std::vector<double> selected_true_rewards(std::span<const StrategyRun> runs) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& run : runs) out.push_back(run.selected_true_reward());
  return out;
}

std::vector<StrategyRun> full_width_runs(const ExperimentConfig& config, std::size_t n,
                                         std::size_t count, std::size_t workers) {
  ExperimentConfig cfg = config;
  cfg.n = n;
  RunOptions opts;
  opts.score_all_scales = true;
  std::vector<StrategyRun> runs(count);
  parallel_for(count, workers,
               [&](std::size_t r) { runs[r] = run_experiment(cfg, Strategy::kBon, r, opts); });
  return runs;
}

ConsistencyCurve consistency(std::span<const StrategyRun> runs, const PotentialSpec& spec) {
  if (runs.empty()) {
    throw std::invalid_argument("consistency: no runs");
  }
  ConsistencyCurve curve;
  curve.replicates = runs.size();
  curve.candidate_count = runs.front().finals.size();
  const std::size_t scales = runs.front().batch.scale_count();
  std::vector<std::size_t> hits(scales, 0);
  for (const auto& run : runs) {
    if (run.finals.size() != curve.candidate_count) {
      throw std::invalid_argument("consistency: runs differ in candidate count");
    }
    std::vector<double> finals;
    for (const auto& f : run.finals) {
      if (f.reward_history.size() != scales) {
        throw std::invalid_argument("consistency: run is not scored at every scale");
      }
      finals.push_back(f.reward);
    }
    const std::size_t best = argmax_lowest(finals);
    for (std::size_t k = 1; k <= scales; ++k) {
      std::vector<double> pot;
      for (const auto& f : run.finals) {
        pot.push_back(log_potential(std::span(f.reward_history).first(k), spec));
      }
      if (argmax_lowest(pot) == best) ++hits[k - 1];
    }
  }
  for (auto h : hits) {
    curve.per_scale.push_back(static_cast<double>(h) / static_cast<double>(runs.size()));
  }
  return curve;
}

void write_consistency_csv(std::ostream& out, const ConsistencyCurve& curve) {
  CsvWriter csv(out);
  csv.row("scale", "consistency", "err");
  const double reps = static_cast<double>(curve.replicates);
  for (std::size_t k = 0; k < curve.per_scale.size(); ++k) {
    const double p = curve.per_scale[k];
    csv.row(k + 1, p, std::sqrt(p * (1.0 - p) / reps));
  }
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kResamplingScales:
      return "resampling_scales";
    case SweepAxis::kClusteringScales:
      return "clustering_scales";
    case SweepAxis::kPotential:
      return "potential_kind";
    case SweepAxis::kLambda:
      return "lambda";
    case SweepAxis::kExtractor:
      return "extractor";
    case SweepAxis::kN:
      return "N";
  }
  return "lambda";
}

SweepAxis parse_sweep_axis(std::string_view text) {
  for (auto axis : {SweepAxis::kResamplingScales, SweepAxis::kClusteringScales,
                    SweepAxis::kPotential, SweepAxis::kLambda, SweepAxis::kExtractor,
                    SweepAxis::kN}) {
    if (text == to_string(axis)) return axis;
  }
  if (text == "n") return SweepAxis::kN;
  if (text == "potential") return SweepAxis::kPotential;
  throw std::invalid_argument("unknown sweep axis '" + std::string(text) + "'");
}

std::string_view sweep_key(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kResamplingScales:
      return "search.resample_scales";
    case SweepAxis::kClusteringScales:
      return "search.cluster_scales";
    case SweepAxis::kPotential:
      return "search.potential";
    case SweepAxis::kLambda:
      return "search.lambda";
    case SweepAxis::kExtractor:
      return "search.extractor";
    case SweepAxis::kN:
      return "search.n";
  }
  return "search.lambda";
}

SweepTable sweep(SweepAxis axis, std::span<const std::string> values, const ExperimentConfig& base,
                 std::size_t workers) {
  if (values.empty()) {
    throw std::invalid_argument("sweep: no values");
  }
  SweepTable table;
  table.axis = axis;
  table.strategy = base.strategy;
  for (const auto& value : values) {
    ExperimentConfig cfg = base;
    apply_setting(cfg, sweep_key(axis), value);
    cfg.validate();
    const auto runs = run_replicates(cfg, cfg.strategy, cfg.replicates, workers);
    SweepRow row;
    row.value = value;
    row.replicates = runs.size();
    row.samples = selected_true_rewards(runs);
    row.reward = runs.size() >= 2
                     ? bootstrap_mean_ci(row.samples, 0.95, 10000, cfg.seed)
                     : ConfidenceInterval{row.samples[0], row.samples[0], row.samples[0]};
    for (const auto& run : runs) {
      for (const auto& ev : run.events) {
        switch (ev.kind) {
          case EventKind::kCluster:
            row.mean_events_cluster += 1.0;
            break;
          case EventKind::kResample:
            row.mean_events_resample += 1.0;
            break;
          case EventKind::kTruncate:
            row.mean_events_truncate += 1.0;
            break;
        }
      }
    }
    const double reps = static_cast<double>(runs.size());
    row.mean_events_cluster /= reps;
    row.mean_events_resample /= reps;
    row.mean_events_truncate /= reps;
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  CsvWriter csv(out);
  csv.row("axis", "value", "strategy", "replicates", "mean", "ci_low", "ci_high",
          "cluster_events", "resample_events", "truncate_events");
  for (const auto& row : table.rows) {
    // Values may contain commas (scale lists).
    std::string value = row.value;
    std::replace(value.begin(), value.end(), ',', ';');
    csv.row(to_string(table.axis), value, to_string(table.strategy), row.replicates,
            row.reward.estimate, row.reward.low, row.reward.high, row.mean_events_cluster,
            row.mean_events_resample, row.mean_events_truncate);
  }
}

namespace {

std::string scale_list(const std::optional<std::set<std::size_t>>& s) {
  if (!s) return "auto";
  std::string out;
  for (auto v : *s) {
    if (!out.empty()) out += ';';
    out += std::to_string(v);
  }
  return out.empty() ? "none" : out;
}

std::string group_label(const ExperimentConfig& c) {
  std::string label = std::string(to_string(c.strategy)) + "/n=" + std::to_string(c.n);
  if (c.strategy == Strategy::kIs || c.strategy == Strategy::kTtsvar) {
    label += "/lambda=" + CsvWriter::format(c.lambda);
  }
  if (c.strategy == Strategy::kTtsvar) {
    label += "/" + std::string(to_string(c.potential)) + "/sc=" + scale_list(c.cluster_scales) +
             "/sr=" + scale_list(c.resample_scales);
  }
  return label;
}

ConfidenceInterval ci_of(const std::vector<double>& v, std::uint64_t seed) {
  if (v.size() < 2) return {v[0], v[0], v[0]};
  return bootstrap_mean_ci(v, 0.95, 10000, seed);
}

}  // namespace

RecordSummary summarize(std::span<const RunRecord> records, std::uint64_t seed) {
  if (records.empty()) {
    throw std::invalid_argument("summarize: no records");
  }
  struct Acc {
    std::vector<std::size_t> replicates;
    std::vector<double> true_rewards;
    std::vector<double> rewards;
  };
  std::map<std::string, Acc> groups;
  for (const auto& r : records) {
    auto& acc = groups[group_label(r.config)];
    acc.replicates.push_back(r.replicate);
    acc.true_rewards.push_back(r.selected_final().true_reward);
    acc.rewards.push_back(r.selected_final().reward);
  }
  RecordSummary out;
  for (auto& [label, acc] : groups) {
    GroupSummary g;
    g.label = label;
    g.records = acc.replicates.size();
    g.true_reward = ci_of(acc.true_rewards, seed);
    g.reward = ci_of(acc.rewards, seed);
    g.replicates = std::move(acc.replicates);
    g.true_rewards = std::move(acc.true_rewards);
    out.groups.push_back(std::move(g));
  }
  for (std::size_t i = 0; i < out.groups.size(); ++i) {
    for (std::size_t j = i + 1; j < out.groups.size(); ++j) {
      const auto& a = out.groups[i];
      const auto& b = out.groups[j];
      std::map<std::size_t, double> bmap;
      for (std::size_t t = 0; t < b.replicates.size(); ++t) {
        bmap.emplace(b.replicates[t], b.true_rewards[t]);
      }
      std::vector<double> pa;
      std::vector<double> pb;
      for (std::size_t t = 0; t < a.replicates.size(); ++t) {
        if (auto it = bmap.find(a.replicates[t]); it != bmap.end()) {
          pa.push_back(a.true_rewards[t]);
          pb.push_back(it->second);
        }
      }
      PairedComparison cmp;
      cmp.a = a.label;
      cmp.b = b.label;
      cmp.pairs = pa.size();
      if (pa.size() >= 2) cmp.paired = paired_t_test(pa, pb);
      if (a.true_rewards.size() >= 2 && b.true_rewards.size() >= 2) {
        cmp.welch = welch_t_test(a.true_rewards, b.true_rewards);
      }
      out.comparisons.push_back(std::move(cmp));
    }
  }
  return out;
}

RecordSummary summarize_files(std::span<const std::filesystem::path> files, std::uint64_t seed) {
  std::vector<RunRecord> records;
  records.reserve(files.size());
  for (const auto& f : files) records.push_back(read_record(f));
  return summarize(records, seed);
}

void write_summary_csv(std::ostream& out, const RecordSummary& summary) {
  CsvWriter csv(out);
  csv.row("group", "records", "mean_true_reward", "ci_low", "ci_high", "mean_reward");
  for (const auto& g : summary.groups) {
    csv.row(g.label, g.records, g.true_reward.estimate, g.true_reward.low, g.true_reward.high,
            g.reward.estimate);
  }
}

void write_paired_csv(std::ostream& out, const RecordSummary& summary) {
  CsvWriter csv(out);
  csv.row("a", "b", "pairs", "mean_diff", "paired_t", "paired_p_two", "paired_p_greater",
          "welch_t", "welch_p_two");
  for (const auto& c : summary.comparisons) {
    csv.row(c.a, c.b, c.pairs, c.paired.mean_difference, c.paired.t, c.paired.p_two_sided,
            c.paired.p_greater, c.welch.t, c.welch.p_two_sided);
  }
}

}  // namespace varsearch
