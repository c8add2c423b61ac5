#include "varsearch/orchestrator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "varsearch/features.hpp"
#include "varsearch/parallel.hpp"

namespace varsearch {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kRaw:
      return "raw";
    case Strategy::kBon:
      return "bon";
    case Strategy::kIs:
      return "is";
    case Strategy::kTtsvar:
      return "ttsvar";
  }
  return "ttsvar";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "raw") return Strategy::kRaw;
  if (text == "bon") return Strategy::kBon;
  if (text == "is") return Strategy::kIs;
  if (text == "ttsvar") return Strategy::kTtsvar;
  throw std::invalid_argument("unknown strategy '" + std::string(text) + "'");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kCluster:
      return "cluster";
    case EventKind::kResample:
      return "resample";
    case EventKind::kTruncate:
      return "truncate";
  }
  return "truncate";
}

std::set<std::size_t> scoring_scales(const SearchConfig& config, std::size_t scales) {
  std::set<std::size_t> out = config.resampling_scales;
  if (config.resampling_scales.empty()) {
    return out;
  }
  switch (config.potential.kind) {
    case PotentialKind::kValue:
      break;
    case PotentialKind::kDiff:
      for (auto s : config.resampling_scales) {
        if (s > 1) out.insert(s - 1);
      }
      break;
    case PotentialKind::kMax:
    case PotentialKind::kSum:
      for (std::size_t s = *config.resampling_scales.begin(); s < scales; ++s) {
        out.insert(s);
      }
      break;
  }
  return out;
}

namespace {

class SearchRun {
 public:
  SearchRun(Strategy strategy, const SearchConfig& config, const BatchSchedule& batch,
            const GeneratorInterface& generator, const RewardInterface& reward,
            const ToyPrompt& prompt, const RunOptions& options)
      : generator_(generator),
        reward_(reward),
        prompt_(prompt),
        options_(options),
        scales_(generator.schedule().scale_count()) {
    run_.strategy = strategy;
    run_.config = config;
    run_.batch = batch;
    if (batch.scale_count() != scales_) {
      throw std::invalid_argument("run: batch schedule has " + std::to_string(batch.scale_count()) +
                                  " scales, generator has " + std::to_string(scales_));
    }
    config.validate(batch);
    scored_ = scoring_scales(config, scales_);
  }

  StrategyRun execute() {
    const std::uint64_t master = run_.config.master_seed;
    live_.assign(run_.batch.at(1), CandidatePath{});
    for (std::size_t k = 1; k <= scales_; ++k) {
      generate(k, master);
      if (k == scales_) break;
      const bool scored = options_.score_all_scales || scored_.contains(k);
      if (scored) {
        score(k, master);
      }
      const std::size_t next = run_.batch.at(k + 1);
      if (run_.config.clustering_scales.contains(k)) {
        cluster(k, next, master);
      } else if (run_.config.resampling_scales.contains(k)) {
        resample(k, next, master);
      } else if (next < live_.size()) {
        truncate(k, next);
      }
      if (live_.size() != next) {
        throw std::logic_error("run: live candidate count diverged from the batch schedule");
      }
    }
    finish(master);
    run_.cost = schedule_cost(generator_.schedule(), run_.batch, options_.dims);
    return std::move(run_);
  }

 private:
  void generate(std::size_t k, std::uint64_t master) {
    if (live_.size() != run_.batch.at(k)) {
      throw std::logic_error("run: live candidate count diverged from the batch schedule");
    }
    parallel_for(live_.size(), options_.workers, [&](std::size_t slot) {
      const StreamSeed seed =
          derive_rng(master, static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(k));
      Rng rng(seed);
      Tensor3 residual = generator_.sample_residual(live_[slot], k, rng);
      live_[slot].append_residual(std::move(residual), seed, generator_.schedule());
    });
  }

  void decode_all(std::size_t k) {
    const auto stale = [k](const CandidatePath& p) {
      return p.decoded.empty() || p.decoded.back().scale != k;
    };
    run_.decode_calls += static_cast<std::size_t>(std::count_if(live_.begin(), live_.end(), stale));
    parallel_for(live_.size(), options_.workers, [&](std::size_t slot) {
      auto& path = live_[slot];
      if (stale(path)) {
        path.decoded.push_back({k, generator_.decode(path.accumulated)});
      }
    });
  }

  void score(std::size_t k, std::uint64_t master) {
    decode_all(k);
    parallel_for(live_.size(), options_.workers, [&](std::size_t slot) {
      auto& path = live_[slot];
      const ScoreContext ctx{
          k, derive_stream(master, StreamKind::kRewardNoise, static_cast<std::uint32_t>(slot),
                           static_cast<std::uint32_t>(k))};
      path.rewards.push_back({k, reward_.score(path.decoded.back().image, prompt_, ctx)});
    });
    run_.reward_calls += live_.size();
  }

  void adopt(std::span<const std::size_t> parents) {
    std::vector<CandidatePath> next;
    next.reserve(parents.size());
    for (auto p : parents) {
      next.push_back(live_[p]);
      next.back().lineage.push_back(p);
    }
    live_ = std::move(next);
  }

  void cluster(std::size_t k, std::size_t next, std::uint64_t master) {
    decode_all(k);
    std::vector<Image> images;
    images.reserve(live_.size());
    for (const auto& p : live_) {
      images.push_back(p.decoded.back().image);
    }
    const EmbeddingSet emb = extract(images, run_.config.extractor, k);
    Rng rng(derive_stream(master, StreamKind::kClustering, 0, static_cast<std::uint32_t>(k)));
    const ClusterResult clusters = kmeanspp_cluster(emb.vectors, next, rng);
    SelectionRecord ev;
    ev.scale = k;
    ev.kind = EventKind::kCluster;
    ev.source_size = live_.size();
    ev.target_size = next;
    ev.selected = diversity_select(emb.vectors, clusters.assignments, clusters.centroids, next);
    ev.assignments = clusters.assignments;
    ev.wcss = clusters.wcss;
    adopt(ev.selected);
    run_.events.push_back(std::move(ev));
  }

  void resample(std::size_t k, std::size_t next, std::uint64_t master) {
    std::vector<std::vector<double>> histories;
    histories.reserve(live_.size());
    for (const auto& p : live_) {
      histories.push_back(p.reward_values());
    }
    const PotentialResult pot = compute_potentials(histories, run_.config.potential);
    Rng rng(derive_stream(master, StreamKind::kSelection, 0, static_cast<std::uint32_t>(k)));
    SelectionRecord ev;
    ev.scale = k;
    ev.kind = EventKind::kResample;
    ev.source_size = live_.size();
    ev.target_size = next;
    ev.selected = multinomial_select(pot.weights, next, rng);
    ev.scores = pot.raw_scores;
    ev.log_potentials = pot.log_potentials;
    ev.weights = pot.weights;
    adopt(ev.selected);
    run_.events.push_back(std::move(ev));
  }

  void truncate(std::size_t k, std::size_t next) {
    SelectionRecord ev;
    ev.scale = k;
    ev.kind = EventKind::kTruncate;
    ev.source_size = live_.size();
    ev.target_size = next;
    ev.selected.resize(next);
    std::iota(ev.selected.begin(), ev.selected.end(), std::size_t{0});
    adopt(ev.selected);
    run_.events.push_back(std::move(ev));
  }

  void finish(std::uint64_t master) {
    score(scales_, master);
    run_.finals.resize(live_.size());
    parallel_for(live_.size(), options_.workers, [&](std::size_t slot) {
      auto& path = live_[slot];
      auto& fin = run_.finals[slot];
      fin.slot = slot;
      fin.image = path.decoded.back().image;
      fin.reward = path.rewards.back().value;
      fin.true_reward = ToyReward::ground_truth(fin.image, prompt_);
      fin.reward_history = path.reward_values();
      fin.lineage = path.lineage;
      fin.stream_seeds = path.stream_seeds;
      fin.image_hash = content_hash(fin.image.values());
    });
    std::vector<double> finals;
    finals.reserve(run_.finals.size());
    for (const auto& f : run_.finals) {
      finals.push_back(f.reward);
    }
    switch (run_.strategy) {
      case Strategy::kRaw:
        run_.selected = 0;
        break;
      case Strategy::kIs: {
        Rng rng(derive_stream(master, StreamKind::kSelection, 0, static_cast<std::uint32_t>(scales_)));
        run_.selected = importance_sampling_baseline(finals, run_.config.potential.lambda, rng);
        break;
      }
      case Strategy::kBon:
      case Strategy::kTtsvar:
        run_.selected = argmax_lowest(finals);
        break;
    }
  }

  const GeneratorInterface& generator_;
  const RewardInterface& reward_;
  const ToyPrompt& prompt_;
  RunOptions options_;
  std::size_t scales_;
  std::set<std::size_t> scored_;
  std::vector<CandidatePath> live_;
  StrategyRun run_;
};

SearchConfig without_selection(const SearchConfig& config) {
  SearchConfig plain = config;
  plain.clustering_scales.clear();
  plain.resampling_scales.clear();
  return plain;
}

}  // namespace

StrategyRun run_ttsvar(const SearchConfig& config, const BatchSchedule& batch,
                       const GeneratorInterface& generator, const RewardInterface& reward,
                       const ToyPrompt& prompt, const RunOptions& options) {
  return SearchRun(Strategy::kTtsvar, config, batch, generator, reward, prompt, options).execute();
}

StrategyRun run_bon(std::size_t n, const SearchConfig& config, const GeneratorInterface& generator,
                    const RewardInterface& reward, const ToyPrompt& prompt,
                    const RunOptions& options) {
  const auto batch = BatchSchedule::constant(generator.schedule().scale_count(), n);
  return SearchRun(Strategy::kBon, without_selection(config), batch, generator, reward, prompt,
                   options)
      .execute();
}

StrategyRun run_is(std::size_t n, double lambda, const SearchConfig& config,
                   const GeneratorInterface& generator, const RewardInterface& reward,
                   const ToyPrompt& prompt, const RunOptions& options) {
  SearchConfig plain = without_selection(config);
  plain.potential.lambda = lambda;
  const auto batch = BatchSchedule::constant(generator.schedule().scale_count(), n);
  return SearchRun(Strategy::kIs, plain, batch, generator, reward, prompt, options).execute();
}

StrategyRun run_raw(const SearchConfig& config, const GeneratorInterface& generator,
                    const RewardInterface& reward, const ToyPrompt& prompt,
                    const RunOptions& options) {
  const auto batch = BatchSchedule::constant(generator.schedule().scale_count(), 1);
  return SearchRun(Strategy::kRaw, without_selection(config), batch, generator, reward, prompt,
                   options)
      .execute();
}

CandidatePath replay_path(const GeneratorInterface& generator, std::span<const StreamSeed> seeds) {
  if (seeds.size() != generator.schedule().scale_count()) {
    throw std::invalid_argument("replay_path: need one stream seed per scale");
  }
  CandidatePath path;
  for (std::size_t k = 1; k <= seeds.size(); ++k) {
    Rng rng(seeds[k - 1]);
    path.append_residual(generator.sample_residual(path, k, rng), seeds[k - 1],
                         generator.schedule());
  }
  return path;
}

Image replay_final_image(const GeneratorInterface& generator, std::span<const StreamSeed> seeds) {
  return generator.decode(replay_path(generator, seeds).accumulated);
}

}  // namespace varsearch
