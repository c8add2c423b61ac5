#include "varsearch/schedule.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace varsearch {

namespace {

constexpr std::array<std::size_t, 13> kBatchTemplate = {8, 8, 6, 6, 6, 4, 2, 2, 2, 1, 1, 1, 1};
constexpr std::array<std::size_t, 13> kInfinityLadder = {1,  2,  4,  6,  8,  12, 16,
                                                         20, 24, 32, 40, 48, 64};

}  // namespace

ScaleSchedule::ScaleSchedule(std::vector<Resolution> resolutions, std::size_t feature_dim)
    : resolutions_(std::move(resolutions)), feature_dim_(feature_dim) {
  if (resolutions_.size() < 2) {
    throw std::invalid_argument("ScaleSchedule: at least two scales are required");
  }
  if (feature_dim_ == 0) {
    throw std::invalid_argument("ScaleSchedule: feature_dim must be positive");
  }
  if (resolutions_.front().rows != 1 || resolutions_.front().cols != 1) {
    throw std::invalid_argument("ScaleSchedule: the first scale must be 1x1");
  }
  for (std::size_t i = 1; i < resolutions_.size(); ++i) {
    const auto& prev = resolutions_[i - 1];
    const auto& cur = resolutions_[i];
    if (cur.rows < prev.rows || cur.cols < prev.cols) {
      throw std::invalid_argument("ScaleSchedule: resolutions must be nondecreasing (scale " +
                                  std::to_string(i + 1) + ")");
    }
  }
}

const Resolution& ScaleSchedule::at(std::size_t scale) const {
  if (scale < 1 || scale > resolutions_.size()) {
    throw std::out_of_range("ScaleSchedule: scale " + std::to_string(scale) + " out of range");
  }
  return resolutions_[scale - 1];
}

std::size_t ScaleSchedule::cumulative_tokens(std::size_t scale) const {
  at(scale);
  std::size_t total = 0;
  for (std::size_t i = 0; i < scale; ++i) {
    total += resolutions_[i].tokens();
  }
  return total;
}

BatchSchedule::BatchSchedule(std::vector<std::size_t> sizes, std::size_t multiplier)
    : sizes_(std::move(sizes)), multiplier_(multiplier) {
  if (sizes_.empty()) {
    throw std::invalid_argument("BatchSchedule: empty schedule");
  }
  if (multiplier_ < 1) {
    throw std::invalid_argument("BatchSchedule: multiplier must be >= 1");
  }
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] < 1) {
      throw std::invalid_argument("BatchSchedule: sizes must be positive");
    }
    if (i > 0 && sizes_[i] > sizes_[i - 1]) {
      throw std::invalid_argument("BatchSchedule: sizes must be nonincreasing (scale " +
                                  std::to_string(i + 1) + ")");
    }
  }
}

BatchSchedule BatchSchedule::from_base(std::span<const std::size_t> base, std::size_t multiplier) {
  if (multiplier < 1) {
    throw std::invalid_argument("BatchSchedule: multiplier must be >= 1");
  }
  std::vector<std::size_t> sizes(base.begin(), base.end());
  for (auto& s : sizes) {
    s *= multiplier;
  }
  return BatchSchedule(std::move(sizes), multiplier);
}

BatchSchedule BatchSchedule::constant(std::size_t scales, std::size_t size) {
  return BatchSchedule(std::vector<std::size_t>(scales, size), size);
}

std::size_t BatchSchedule::at(std::size_t scale) const {
  if (scale < 1 || scale > sizes_.size()) {
    throw std::out_of_range("BatchSchedule: scale " + std::to_string(scale) + " out of range");
  }
  return sizes_[scale - 1];
}

std::span<const std::size_t> batch_template() { return kBatchTemplate; }

std::vector<std::size_t> stretched_template(std::size_t scales) {
  if (scales < 2) {
    throw std::invalid_argument("stretched_template: need at least two scales");
  }
  const std::size_t last = kBatchTemplate.size() - 1;
  std::vector<std::size_t> out(scales);
  for (std::size_t k = 0; k < scales; ++k) {
    // Exact rational position k * last / (K - 1); round half down.
    const std::size_t num = k * last;
    const std::size_t den = scales - 1;
    std::size_t idx = num / den;
    const std::size_t rem = num % den;
    if (2 * rem > den) {
      ++idx;
    }
    out[k] = kBatchTemplate[idx];
  }
  return out;
}

BatchSchedule make_default_schedule(std::size_t scales, std::size_t multiplier) {
  if (scales < 2) {
    throw std::invalid_argument("make_default_schedule: K must be >= 2");
  }
  if (multiplier < 1) {
    throw std::invalid_argument("make_default_schedule: N must be >= 1");
  }
  const auto base = stretched_template(scales);
  return BatchSchedule::from_base(base, multiplier);
}

std::vector<std::size_t> descent_scales(const BatchSchedule& batch) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < batch.scale_count(); ++i) {
    if (batch.at(i + 1) < batch.at(i)) {
      out.push_back(i);
    }
  }
  return out;
}

DefaultSearchScales default_search_scales(const BatchSchedule& batch) {
  const auto descents = descent_scales(batch);
  DefaultSearchScales out;
  const std::size_t half = descents.size() / 2;
  for (std::size_t i = 0; i < descents.size(); ++i) {
    (i < half ? out.clustering : out.resampling).insert(descents[i]);
  }
  return out;
}

ScaleSchedule square_ladder(std::span<const std::size_t> sides, std::size_t feature_dim) {
  std::vector<Resolution> res;
  res.reserve(sides.size());
  for (auto s : sides) {
    res.push_back({s, s});
  }
  return ScaleSchedule(std::move(res), feature_dim);
}

ScaleSchedule toy_default_scales() {
  constexpr std::array<std::size_t, 6> sides = {1, 2, 4, 8, 16, 32};
  return square_ladder(sides, 4);
}

ScaleSchedule infinity_like_scales() { return square_ladder(kInfinityLadder, 4); }

}  // namespace varsearch
