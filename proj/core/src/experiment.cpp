#include "varsearch/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "varsearch/csv.hpp"
#include "varsearch/features.hpp"
#include "varsearch/image_io.hpp"

namespace varsearch {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("config key '" + std::string(key) + "': " + std::string(why) + " (got '" +
                    std::string(value) + "')");
}

std::uint64_t to_u64(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    bad_value(key, text, "expected a non-negative integer");
  }
  return v;
}

std::size_t to_size(std::string_view key, std::string_view text, std::size_t min_value = 0) {
  const auto v = static_cast<std::size_t>(to_u64(key, text));
  if (v < min_value) {
    bad_value(key, text, "must be >= " + std::to_string(min_value));
  }
  return v;
}

double to_double(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    bad_value(key, text, "expected a number");
  }
  if (pos != s.size() || !std::isfinite(v)) {
    bad_value(key, text, "expected a finite number");
  }
  return v;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> to_doubles(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (auto item : split_list(text)) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::size_t> to_sizes(std::string_view key, std::string_view text,
                                  std::size_t min_value = 0) {
  std::vector<std::size_t> out;
  for (auto item : split_list(text)) out.push_back(to_size(key, item, min_value));
  return out;
}

Resolution to_resolution(std::string_view key, std::string_view text) {
  text = trim(text);
  const auto x = text.find('x');
  if (x == std::string_view::npos) {
    const auto side = to_size(key, text, 1);
    return {side, side};
  }
  return {to_size(key, text.substr(0, x), 1), to_size(key, text.substr(x + 1), 1)};
}

std::optional<std::set<std::size_t>> to_scale_set(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  if (t == "auto") return std::nullopt;
  std::set<std::size_t> out;
  if (t == "none" || t.empty()) return out;
  for (auto s : to_sizes(key, t, 1)) out.insert(s);
  return out;
}

std::string join_sizes(const auto& values) {
  std::string out;
  for (auto v : values) {
    if (!out.empty()) out += ',';
    out += std::to_string(v);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (auto v : values) {
    if (!out.empty()) out += ',';
    out += CsvWriter::format(v);
  }
  return out;
}

std::string scale_set_text(const std::optional<std::set<std::size_t>>& set) {
  if (!set) return "auto";
  if (set->empty()) return "none";
  return join_sizes(*set);
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
  std::string key;
  Setter set;
  Getter get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"strategy",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         try {
           c.strategy = parse_strategy(trim(v));
         } catch (const std::invalid_argument&) {
           bad_value(k, v, "expected raw|bon|is|ttsvar");
         }
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.strategy)); }},
      {"search.n",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.n = to_size(k, v, 1); },
       [](const ExperimentConfig& c) { return std::to_string(c.n); }},
      {"search.lambda",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.lambda = to_double(k, v);
         if (c.lambda < 0.0) bad_value(k, v, "must be >= 0");
       },
       [](const ExperimentConfig& c) { return CsvWriter::format(c.lambda); }},
      {"search.potential",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         try {
           c.potential = parse_potential_kind(trim(v));
         } catch (const std::invalid_argument&) {
           bad_value(k, v, "expected value|diff|max|sum");
         }
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.potential)); }},
      {"search.cluster_scales",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.cluster_scales = to_scale_set(k, v);
       },
       [](const ExperimentConfig& c) { return scale_set_text(c.cluster_scales); }},
      {"search.resample_scales",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.resample_scales = to_scale_set(k, v);
       },
       [](const ExperimentConfig& c) { return scale_set_text(c.resample_scales); }},
      {"search.extractor",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         try {
           c.extractor.tag = parse_extractor_tag(trim(v));
         } catch (const std::invalid_argument&) {
           bad_value(k, v, "expected patch_pca|pooled|raw");
         }
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.extractor.tag)); }},
      {"search.seed",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.seed = to_u64(k, v); },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      {"search.replicates",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.replicates = to_size(k, v, 1);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.replicates); }},
      {"schedule.resolutions",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         std::vector<Resolution> res;
         for (auto item : split_list(v)) res.push_back(to_resolution(k, item));
         try {
           c.scales = ScaleSchedule(std::move(res), c.scales.feature_dim());
         } catch (const std::invalid_argument& e) {
           bad_value(k, v, e.what());
         }
       },
       [](const ExperimentConfig& c) {
         std::string out;
         for (const auto& r : c.scales.resolutions()) {
           if (!out.empty()) out += ',';
           out += r.rows == r.cols ? std::to_string(r.rows)
                                   : std::to_string(r.rows) + "x" + std::to_string(r.cols);
         }
         return out;
       }},
      {"schedule.feature_dim",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.scales = ScaleSchedule(c.scales.resolutions(), to_size(k, v, 1));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.scales.feature_dim()); }},
      {"schedule.batch",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         if (trim(v) == "default") {
           c.batch_base.reset();
         } else {
           c.batch_base = to_sizes(k, v, 1);
         }
       },
       [](const ExperimentConfig& c) {
         return c.batch_base ? join_sizes(*c.batch_base) : std::string("default");
       }},
      {"generator.alpha",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.drift = to_double(k, v);
       },
       [](const ExperimentConfig& c) { return CsvWriter::format(c.drift); }},
      {"generator.noise",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         if (trim(v) == "default") {
           c.noise.reset();
         } else {
           c.noise = to_doubles(k, v);
         }
       },
       [](const ExperimentConfig& c) {
         return c.noise ? join_doubles(*c.noise) : std::string("default");
       }},
      {"generator.gain",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.gain = to_double(k, v); },
       [](const ExperimentConfig& c) { return CsvWriter::format(c.gain); }},
      {"reward.noise",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         const auto t = trim(v);
         c.reward_noise = (t == "none" || t.empty()) ? std::vector<double>{} : to_doubles(k, t);
       },
       [](const ExperimentConfig& c) {
         return c.reward_noise.empty() ? std::string("none") : join_doubles(c.reward_noise);
       }},
      {"target.source",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         const auto t = trim(v);
         if (t == "procedural") {
           c.target.source = TargetSource::kProcedural;
         } else if (t == "file") {
           c.target.source = TargetSource::kFile;
         } else {
           bad_value(k, v, "expected procedural|file");
         }
       },
       [](const ExperimentConfig& c) {
         return std::string(c.target.source == TargetSource::kFile ? "file" : "procedural");
       }},
      {"target.pattern",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         try {
           c.target.pattern = parse_target_pattern(trim(v));
         } catch (const std::invalid_argument&) {
           bad_value(k, v, "expected auto|blobs|stripes|checker");
         }
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.target.pattern)); }},
      {"target.seed",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.target.seed = to_u64(k, v);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.target.seed); }},
      {"target.file",
       [](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.target.file = std::string(trim(v));
       },
       [](const ExperimentConfig& c) { return c.target.file.string(); }},
      {"target.patch",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.target.patch = to_size(k, v, 1);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.target.patch); }},
      {"extractor.grid",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         const auto r = to_resolution(k, v);
         c.extractor.grid_rows = r.rows;
         c.extractor.grid_cols = r.cols;
       },
       [](const ExperimentConfig& c) {
         return c.extractor.grid_rows == c.extractor.grid_cols
                    ? std::to_string(c.extractor.grid_rows)
                    : std::to_string(c.extractor.grid_rows) + "x" +
                          std::to_string(c.extractor.grid_cols);
       }},
      {"extractor.sub",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.extractor.sub = to_size(k, v, 1);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.extractor.sub); }},
      {"model.hidden",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.model.hidden = to_size(k, v, 1);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.model.hidden); }},
      {"model.layers",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.model.layers = to_size(k, v, 1);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.model.layers); }},
      {"model.heads",
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.model.heads = to_size(k, v, 1);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.model.heads); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("config key '" + std::string(key) + "' given more than once");
    }
    apply_setting(base, key, view.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  return parse_config(in, std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) {
    out.emplace_back(f.key, f.get(config));
  }
  return out;
}

void write_config(std::ostream& out, const ExperimentConfig& config) {
  for (const auto& [k, v] : config_entries(config)) {
    out << k << " = " << v << '\n';
  }
}

BatchSchedule search_batch(const ExperimentConfig& config) {
  const std::size_t k = config.scales.scale_count();
  if (config.batch_base) {
    if (config.batch_base->size() != k) {
      throw ConfigError("config key 'schedule.batch': needs " + std::to_string(k) + " entries");
    }
    try {
      return BatchSchedule::from_base(*config.batch_base, config.n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key 'schedule.batch': ") + e.what());
    }
  }
  return make_default_schedule(k, config.n);
}

BatchSchedule strategy_batch(const ExperimentConfig& config) {
  const std::size_t k = config.scales.scale_count();
  switch (config.strategy) {
    case Strategy::kRaw:
      return BatchSchedule::constant(k, 1);
    case Strategy::kBon:
    case Strategy::kIs:
      return BatchSchedule::constant(k, config.n);
    case Strategy::kTtsvar:
      break;
  }
  return search_batch(config);
}

std::uint64_t replicate_master_seed(std::uint64_t seed, std::size_t replicate) {
  return derive_stream(seed, StreamKind::kReplicate, static_cast<std::uint32_t>(replicate), 0).value;
}

SearchConfig search_config(const ExperimentConfig& config, std::size_t replicate) {
  SearchConfig out;
  const auto defaults = default_search_scales(search_batch(config));
  out.clustering_scales = config.cluster_scales.value_or(defaults.clustering);
  out.resampling_scales = config.resample_scales.value_or(defaults.resampling);
  out.potential = {config.potential, config.lambda};
  out.extractor = config.extractor;
  out.master_seed = replicate_master_seed(config.seed, replicate);
  out.replicates = config.replicates;
  return out;
}

ToyPrompt make_prompt(const ExperimentConfig& config, std::size_t replicate) {
  const auto& fin = config.scales.final_resolution();
  ToyPrompt prompt;
  if (config.target.source == TargetSource::kFile) {
    try {
      prompt.target = read_pgm(config.target.file);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config key 'target.file': ") + e.what());
    }
    prompt.label = config.target.file.string();
    return prompt;
  }
  const std::uint64_t seed = config.target.seed + replicate;
  prompt.target = procedural_target(config.target.pattern, seed, fin.rows * config.target.patch,
                                    fin.cols * config.target.patch);
  prompt.label = std::string(to_string(config.target.pattern)) + "#" + std::to_string(seed);
  return prompt;
}

ToyGeneratorParams generator_params(const ExperimentConfig& config) {
  ToyGeneratorParams p = ToyGeneratorParams::defaults(config.scales.scale_count());
  if (config.noise) p.noise_scale = *config.noise;
  p.drift = config.drift;
  p.pixel_decoder_gain = config.gain;
  return p;
}

ToyReward make_reward(const ExperimentConfig& config) {
  if (config.reward_noise.size() > config.scales.scale_count()) {
    throw ConfigError("config key 'reward.noise': more entries than scales");
  }
  try {
    return ToyReward(config.reward_noise);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config key 'reward.noise': ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  try {
    generator_params(*this).validate(scales.scale_count());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("generator settings: ") + e.what());
  }
  make_reward(*this);
  model.validate();
  const auto batch = strategy_batch(*this);
  search_config(*this, 0).validate(search_batch(*this));
  (void)batch;
  const ToyPrompt prompt = make_prompt(*this, 0);
  try {
    const ToyGenerator gen(scales, generator_params(*this), prompt);
    if (strategy == Strategy::kTtsvar && !search_config(*this, 0).clustering_scales.empty()) {
      const Image probe(prompt.target.rows(), prompt.target.cols(), 0.5);
      const std::vector<Image> images(2, probe);
      extract(images, extractor);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

StrategyRun run_experiment(const ExperimentConfig& config, Strategy strategy,
                           std::size_t replicate, const RunOptions& options) {
  const ToyPrompt prompt = make_prompt(config, replicate);
  const ToyGenerator generator(config.scales, generator_params(config), prompt);
  const ToyReward reward = make_reward(config);
  const SearchConfig search = search_config(config, replicate);
  RunOptions opts = options;
  opts.dims = config.model;
  switch (strategy) {
    case Strategy::kRaw:
      return run_raw(search, generator, reward, prompt, opts);
    case Strategy::kBon:
      return run_bon(config.n, search, generator, reward, prompt, opts);
    case Strategy::kIs:
      return run_is(config.n, config.lambda, search, generator, reward, prompt, opts);
    case Strategy::kTtsvar:
      break;
  }
  return run_ttsvar(search, search_batch(config), generator, reward, prompt, opts);
}

StrategyRun run_experiment(const ExperimentConfig& config, std::size_t replicate,
                           const RunOptions& options) {
  return run_experiment(config, config.strategy, replicate, options);
}

}  // namespace varsearch
