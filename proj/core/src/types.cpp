#include "varsearch/types.hpp"

#include <cmath>
#include <string>

namespace varsearch {

std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::kValue:
      return "value";
    case PotentialKind::kDiff:
      return "diff";
    case PotentialKind::kMax:
      return "max";
    case PotentialKind::kSum:
      return "sum";
  }
  return "value";
}

PotentialKind parse_potential_kind(std::string_view text) {
  if (text == "value") return PotentialKind::kValue;
  if (text == "diff") return PotentialKind::kDiff;
  if (text == "max") return PotentialKind::kMax;
  if (text == "sum") return PotentialKind::kSum;
  throw std::invalid_argument("unknown potential kind '" + std::string(text) + "'");
}

void PotentialSpec::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw std::invalid_argument("PotentialSpec: lambda must be finite and >= 0");
  }
}

std::string_view to_string(ExtractorTag tag) {
  switch (tag) {
    case ExtractorTag::kPatchPca:
      return "patch_pca";
    case ExtractorTag::kPooled:
      return "pooled";
    case ExtractorTag::kRawDownsample:
      return "raw";
  }
  return "patch_pca";
}

ExtractorTag parse_extractor_tag(std::string_view text) {
  if (text == "patch_pca") return ExtractorTag::kPatchPca;
  if (text == "pooled") return ExtractorTag::kPooled;
  if (text == "raw" || text == "raw_downsample") return ExtractorTag::kRawDownsample;
  throw std::invalid_argument("unknown extractor '" + std::string(text) + "'");
}

void SearchConfig::validate(const BatchSchedule& batch) const {
  potential.validate();
  const std::size_t scales = batch.scale_count();
  auto check_range = [&](const std::set<std::size_t>& set, const char* name) {
    for (auto s : set) {
      if (s < 1 || s + 1 > scales) {
        throw ConfigError(std::string(name) + ": scale " + std::to_string(s) +
                          " outside 1.." + std::to_string(scales - 1));
      }
      if (batch.at(s + 1) > batch.at(s)) {
        throw ConfigError(std::string(name) + ": selection at scale " + std::to_string(s) +
                          " would grow the batch");
      }
    }
  };
  check_range(clustering_scales, "clustering_scales");
  check_range(resampling_scales, "resampling_scales");
  for (auto s : clustering_scales) {
    if (resampling_scales.contains(s)) {
      throw ConfigError("scale " + std::to_string(s) +
                        " is in both clustering_scales and resampling_scales");
    }
  }
  if (replicates < 1) {
    throw ConfigError("replicates must be >= 1");
  }
}

void CandidatePath::append_residual(Tensor3 residual, StreamSeed seed,
                                    const ScaleSchedule& schedule) {
  const std::size_t scale = depth() + 1;
  const auto& res = schedule.at(scale);
  if (residual.rows() != res.rows || residual.cols() != res.cols ||
      residual.channels() != schedule.feature_dim()) {
    throw std::invalid_argument("CandidatePath: residual shape does not match scale " +
                                std::to_string(scale));
  }
  const auto& fin = schedule.final_resolution();
  if (accumulated.empty()) {
    accumulated = Tensor3(fin.rows, fin.cols, schedule.feature_dim());
  }
  accumulated += upsample_nearest(residual, fin.rows, fin.cols);
  residuals.push_back(std::move(residual));
  stream_seeds.push_back(seed);
}

std::vector<double> CandidatePath::reward_values() const {
  std::vector<double> out;
  out.reserve(rewards.size());
  for (const auto& r : rewards) {
    out.push_back(r.value);
  }
  return out;
}

}  // namespace varsearch
