#include "varsearch/record.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "varsearch/generator.hpp"

namespace varsearch {

using nlohmann::ordered_json;

namespace {

constexpr int kRecordVersion = 1;

ordered_json event_json(const SelectionRecord& ev) {
  ordered_json j;
  j["scale"] = ev.scale;
  j["kind"] = std::string(to_string(ev.kind));
  j["source_size"] = ev.source_size;
  j["target_size"] = ev.target_size;
  j["selected"] = ev.selected;
  if (ev.kind == EventKind::kResample) {
    j["scores"] = ev.scores;
    j["log_potentials"] = ev.log_potentials;
    j["weights"] = ev.weights;
  }
  if (ev.kind == EventKind::kCluster) {
    j["assignments"] = ev.assignments;
    j["wcss"] = ev.wcss;
  }
  return j;
}

ordered_json final_json(const FinalCandidate& f) {
  ordered_json j;
  j["slot"] = f.slot;
  j["reward"] = f.reward;
  j["true_reward"] = f.true_reward;
  j["reward_history"] = f.reward_history;
  j["lineage"] = f.lineage;
  std::vector<std::uint64_t> seeds;
  for (const auto& s : f.stream_seeds) seeds.push_back(s.value);
  j["stream_seeds"] = seeds;
  j["image_hash"] = f.image_hash;
  return j;
}

}  // namespace

std::string render_record(const ExperimentConfig& config, std::size_t replicate,
                          const StrategyRun& run) {
  ExperimentConfig effective = config;
  effective.strategy = run.strategy;
  ordered_json j;
  j["version"] = kRecordVersion;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config_entries(effective)) cfg[k] = v;
  j["config"] = cfg;
  j["strategy"] = std::string(to_string(run.strategy));
  j["n"] = effective.n;
  j["replicate"] = replicate;
  j["master_seed"] = run.config.master_seed;
  j["batch"] = run.batch.sizes();
  j["clustering_scales"] = run.config.clustering_scales;
  j["resampling_scales"] = run.config.resampling_scales;
  ordered_json events = ordered_json::array();
  for (const auto& ev : run.events) events.push_back(event_json(ev));
  j["events"] = events;
  ordered_json finals = ordered_json::array();
  for (const auto& f : run.finals) finals.push_back(final_json(f));
  j["finals"] = finals;
  j["selected"] = run.selected;
  j["selected_reward"] = run.selected_candidate().reward;
  j["selected_true_reward"] = run.selected_true_reward();
  j["cost"] = {{"total_flops", run.cost.total_flops},
               {"total_mem", run.cost.total_mem},
               {"peak_mem", run.cost.peak_mem}};
  j["decode_calls"] = run.decode_calls;
  j["reward_calls"] = run.reward_calls;
  return j.dump(2) + "\n";
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    out << text;
    out.flush();
    if (!out) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_record(const std::filesystem::path& path, const ExperimentConfig& config,
                  std::size_t replicate, const StrategyRun& run) {
  write_text_atomic(path, render_record(config, replicate, run));
}

RunRecord parse_record(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw std::runtime_error(std::string("run record: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kRecordVersion) {
      throw std::runtime_error("run record: unsupported version");
    }
    RunRecord r;
    for (const auto& [k, v] : j.at("config").items()) {
      apply_setting(r.config, k, v.get<std::string>());
    }
    r.replicate = j.at("replicate").get<std::size_t>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.batch = j.at("batch").get<std::vector<std::size_t>>();
    r.event_count = j.at("events").size();
    for (const auto& f : j.at("finals")) {
      RecordedFinal rf;
      rf.slot = f.at("slot").get<std::size_t>();
      rf.reward = f.at("reward").get<double>();
      rf.true_reward = f.at("true_reward").get<double>();
      rf.image_hash = f.at("image_hash").get<std::uint64_t>();
      rf.lineage = f.at("lineage").get<std::vector<std::size_t>>();
      for (auto s : f.at("stream_seeds").get<std::vector<std::uint64_t>>()) {
        rf.stream_seeds.push_back({s});
      }
      r.finals.push_back(std::move(rf));
    }
    r.selected = j.at("selected").get<std::size_t>();
    if (r.selected >= r.finals.size()) {
      throw std::runtime_error("run record: selected index out of range");
    }
    return r;
  } catch (const ordered_json::exception& e) {
    throw std::runtime_error(std::string("run record: ") + e.what());
  }
}

RunRecord read_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open run record " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_record(text.str());
}

Image replay_record(const RunRecord& record, std::size_t slot) {
  if (slot >= record.finals.size()) {
    throw std::out_of_range("replay: lineage " + std::to_string(slot) + " not in record (" +
                            std::to_string(record.finals.size()) + " finals)");
  }
  const ToyPrompt prompt = make_prompt(record.config, record.replicate);
  const ToyGenerator generator(record.config.scales, generator_params(record.config), prompt);
  return replay_final_image(generator, record.finals[slot].stream_seeds);
}

}  // namespace varsearch
