#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "varsearch/analysis.hpp"
#include "varsearch/costmodel.hpp"
#include "varsearch/csv.hpp"
#include "varsearch/experiment.hpp"
#include "varsearch/image_io.hpp"
#include "varsearch/record.hpp"

namespace varsearch::cli {

namespace {

namespace fs = std::filesystem;

// Flags shared by every command that builds an ExperimentConfig.
struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::optional<std::string> strategy;
  std::optional<std::size_t> n;
  std::optional<std::string> lambda;
  std::optional<std::string> potential;
  std::optional<std::string> cluster_scales;
  std::optional<std::string> resample_scales;
  std::optional<std::string> extractor;
  std::vector<std::string> sets;
};

void add_common(CLI::App& cmd, CommonFlags& f, bool out_required) {
  cmd.add_option("--config", f.config, "Config file (key = value lines)");
  auto* out = cmd.add_option("--out", f.out, "Output directory");
  if (out_required) out->required();
  cmd.add_option("--seed", f.seed, "Master seed (overrides VARSEARCH_SEED)");
  cmd.add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd.add_option("--strategy", f.strategy, "raw|bon|is|ttsvar");
  cmd.add_option("--n", f.n, "Batch multiplier N");
  cmd.add_option("--lambda", f.lambda, "Tilt temperature");
  cmd.add_option("--potential", f.potential, "value|diff|max|sum");
  cmd.add_option("--cluster-scales", f.cluster_scales, "Scale list, 'auto' or 'none'");
  cmd.add_option("--resample-scales", f.resample_scales, "Scale list, 'auto' or 'none'");
  cmd.add_option("--extractor", f.extractor, "patch_pca|pooled|raw");
  cmd.add_option("--set", f.sets, "Override, key=value (repeatable)");
}

// Precedence: defaults < config file < VARSEARCH_SEED < --set < flags.
ExperimentConfig build_config(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = load_config(f.config);
  if (const char* env = std::getenv("VARSEARCH_SEED"); env != nullptr && *env != '\0') {
    try {
      apply_setting(cfg, "search.seed", env);
    } catch (const ConfigError&) {
      throw ConfigError(std::string("VARSEARCH_SEED: expected a non-negative integer (got '") +
                        env + "')");
    }
  }
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value (got '" + s + "')");
    }
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.strategy) apply_setting(cfg, "strategy", *f.strategy);
  if (f.n) apply_setting(cfg, "search.n", std::to_string(*f.n));
  if (f.lambda) apply_setting(cfg, "search.lambda", *f.lambda);
  if (f.potential) apply_setting(cfg, "search.potential", *f.potential);
  if (f.cluster_scales) apply_setting(cfg, "search.cluster_scales", *f.cluster_scales);
  if (f.resample_scales) apply_setting(cfg, "search.resample_scales", *f.resample_scales);
  if (f.extractor) apply_setting(cfg, "search.extractor", *f.extractor);
  cfg.validate();
  return cfg;
}

fs::path prepare_out(const std::string& out) {
  const fs::path dir(out);
  fs::create_directories(dir);
  const fs::path probe = dir / ".write-probe";
  {
    std::ofstream p(probe);
    if (!p) throw std::runtime_error("output directory not writable: " + dir.string());
  }
  fs::remove(probe);
  return dir;
}

std::string record_name(std::size_t replicate) {
  std::ostringstream name;
  name << "run-" << std::setw(4) << std::setfill('0') << replicate << ".json";
  return name.str();
}

void write_effective_config(const fs::path& dir, const ExperimentConfig& cfg) {
  std::ostringstream text;
  write_config(text, cfg);
  write_text_atomic(dir / "config.txt", text.str());
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto semi = text.find(';', start);
    out.push_back(text.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return out;
}

std::vector<std::size_t> parse_batch_list(const std::string& text) {
  ExperimentConfig scratch;
  apply_setting(scratch, "schedule.batch", text);
  return scratch.batch_base.value_or(std::vector<std::size_t>{});
}

int cmd_run(const CommonFlags& f, std::ostream& out) {
  const ExperimentConfig cfg = build_config(f);
  const fs::path dir = prepare_out(f.out);
  write_effective_config(dir, cfg);
  const auto runs = run_replicates(cfg, cfg.strategy, cfg.replicates, f.workers);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    write_record(dir / record_name(r), cfg, r, runs[r]);
  }
  const auto rewards = selected_true_rewards(runs);
  out << "strategy " << to_string(cfg.strategy) << ", n " << cfg.n << ", " << runs.size()
      << " replicate(s), mean true reward " << CsvWriter::format(mean(rewards)) << "\n";
  out << "records in " << dir.string() << "\n";
  return kOk;
}

int cmd_sweep(const CommonFlags& f, const std::string& axis_text, const std::string& values_text,
              std::ostream& out) {
  const SweepAxis axis = parse_sweep_axis(axis_text);
  const ExperimentConfig cfg = build_config(f);
  const fs::path dir = prepare_out(f.out);
  write_effective_config(dir, cfg);
  const auto values = split_values(values_text);
  const SweepTable table = sweep(axis, values, cfg, f.workers);
  std::ostringstream csv;
  write_sweep_csv(csv, table);
  write_text_atomic(dir / "sweep.csv", csv.str());
  out << csv.str();
  return kOk;
}

int cmd_consistency(const CommonFlags& f, std::size_t replicates, std::ostream& out) {
  ExperimentConfig cfg = build_config(f);
  const fs::path dir = prepare_out(f.out);
  write_effective_config(dir, cfg);
  const auto runs = full_width_runs(cfg, cfg.n, replicates, f.workers);
  const ConsistencyCurve curve = consistency(runs, {cfg.potential, cfg.lambda});
  std::ostringstream csv;
  write_consistency_csv(csv, curve);
  write_text_atomic(dir / "consistency.csv", csv.str());
  out << csv.str();
  return kOk;
}

int cmd_cost(const CommonFlags& f, const std::string& ladder, const std::string& fixed_text,
             const std::string& adaptive_text, std::ostream& out) {
  CommonFlags flags = f;
  if (ladder == "infinity") {
    flags.sets.insert(flags.sets.begin(),
                      "schedule.resolutions=1,2,4,6,8,12,16,20,24,32,40,48,64");
  } else if (ladder != "config") {
    throw ConfigError("--ladder expects 'config' or 'infinity' (got '" + ladder + "')");
  }
  const ExperimentConfig cfg = build_config(flags);
  const std::size_t k = cfg.scales.scale_count();
  BatchSchedule fixed = BatchSchedule::constant(k, 1);
  if (!fixed_text.empty()) {
    const auto sizes = parse_batch_list(fixed_text);
    fixed = sizes.size() == 1 ? BatchSchedule::constant(k, sizes[0]) : BatchSchedule(sizes);
  }
  BatchSchedule adaptive = search_batch(cfg);
  if (!adaptive_text.empty()) {
    adaptive = BatchSchedule(parse_batch_list(adaptive_text));
  }
  const ScheduleComparison cmp = compare_schedules(fixed, adaptive, cfg.scales, cfg.model);
  std::ostringstream csv;
  write_comparison_csv(csv, cmp);
  if (!f.out.empty()) {
    const fs::path dir = prepare_out(f.out);
    write_text_atomic(dir / "cost.csv", csv.str());
    std::ostringstream fixed_csv;
    write_cost_csv(fixed_csv, cfg.scales, fixed, cmp.fixed);
    write_text_atomic(dir / "cost_fixed.csv", fixed_csv.str());
    std::ostringstream adaptive_csv;
    write_cost_csv(adaptive_csv, cfg.scales, adaptive, cmp.adaptive);
    write_text_atomic(dir / "cost_adaptive.csv", adaptive_csv.str());
  }
  out << csv.str();
  out << "total_flops_ratio," << CsvWriter::format(cmp.total_flops_ratio) << "\n";
  out << "peak_mem_ratio," << CsvWriter::format(cmp.peak_mem_ratio) << "\n";
  return kOk;
}

int cmd_replay(const std::string& record_path, std::size_t lineage, const std::string& image_out,
               std::ostream& out, std::ostream& err) {
  const RunRecord record = read_record(record_path);
  if (lineage >= record.finals.size()) {
    err << "replay: lineage " << lineage << " not in record (" << record.finals.size()
        << " final candidates)\n";
    return kUsage;
  }
  const Image image = replay_record(record, lineage);
  const std::uint64_t hash = content_hash(image.values());
  if (!image_out.empty()) {
    const fs::path p(image_out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_pgm(p, image);
  }
  const bool match = hash == record.finals[lineage].image_hash;
  out << "lineage " << lineage << " hash " << std::hex << std::setw(16) << std::setfill('0')
      << hash << std::dec << (match ? " matches record" : " DIFFERS from record") << "\n";
  return match ? kOk : kMismatch;
}

int cmd_summarize(const std::vector<std::string>& inputs, const std::string& out_dir,
                  std::uint64_t seed, std::ostream& out) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      }
    } else {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw std::invalid_argument("summarize: no run records found");
  }
  const RecordSummary summary = summarize_files(files, seed);
  std::ostringstream groups;
  write_summary_csv(groups, summary);
  std::ostringstream paired;
  write_paired_csv(paired, summary);
  if (!out_dir.empty()) {
    const fs::path dir = prepare_out(out_dir);
    write_text_atomic(dir / "summary.csv", groups.str());
    write_text_atomic(dir / "paired.csv", paired.str());
  }
  out << groups.str() << paired.str();
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Coarse-to-fine test-time search on a synthetic multi-scale generator",
               "varsearch");
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "Run one strategy and write run records");
  add_common(*run, run_flags, true);

  CommonFlags sweep_flags;
  std::string axis;
  std::string values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Ablation sweep over one axis");
  add_common(*sweep_cmd, sweep_flags, true);
  sweep_cmd
      ->add_option("--axis", axis,
                   "resampling_scales|clustering_scales|potential_kind|lambda|extractor|N")
      ->required();
  sweep_cmd->add_option("--values", values, "Values separated by ';'")->required();

  CommonFlags cons_flags;
  std::size_t cons_replicates = 500;
  auto* cons = app.add_subcommand("consistency", "Consistency-vs-scale curve");
  add_common(*cons, cons_flags, true);
  cons->add_option("--replicates", cons_replicates, "Full-width runs")->check(CLI::PositiveNumber);

  CommonFlags cost_flags;
  std::string ladder = "config";
  std::string fixed_batch;
  std::string adaptive_batch;
  auto* cost = app.add_subcommand("cost", "FLOPs and memory, fixed vs adaptive batch");
  add_common(*cost, cost_flags, false);
  cost->add_option("--ladder", ladder, "config|infinity");
  cost->add_option("--fixed-batch", fixed_batch, "Single size or per-scale list (default 1)");
  cost->add_option("--adaptive-batch", adaptive_batch, "Per-scale list (default template x N)");

  std::string record_path;
  std::size_t lineage = 0;
  std::string image_out;
  std::size_t replay_workers = 1;
  auto* replay = app.add_subcommand("replay", "Regenerate a final candidate from a run record");
  replay->add_option("--record", record_path, "Run record file")->required();
  replay->add_option("--lineage", lineage, "Final candidate slot")->required();
  replay->add_option("--out", image_out, "Write the image as PGM");
  replay->add_option("--workers", replay_workers, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> inputs;
  std::string summary_out;
  std::uint64_t summary_seed = 0;
  auto* summ = app.add_subcommand("summarize", "Aggregate statistics over run records");
  summ->add_option("inputs", inputs, "Record files or directories")->required();
  summ->add_option("--out", summary_out, "Output directory");
  summ->add_option("--seed", summary_seed, "Bootstrap seed");

  // CLI11 consumes the vector from the back and expects no program name.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_flags, out);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, axis, values, out);
    if (*cons) return cmd_consistency(cons_flags, cons_replicates, out);
    if (*cost) return cmd_cost(cost_flags, ladder, fixed_batch, adaptive_batch, out);
    if (*replay) return cmd_replay(record_path, lineage, image_out, out, err);
    if (*summ) return cmd_summarize(inputs, summary_out, summary_seed, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace varsearch::cli
