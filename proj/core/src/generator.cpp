#include "varsearch/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace varsearch {

Tensor3 accumulate(std::span<const Tensor3> residuals, const ScaleSchedule& schedule) {
  if (residuals.size() > schedule.scale_count()) {
    throw std::invalid_argument("accumulate: more residuals than scales");
  }
  const auto& fin = schedule.final_resolution();
  Tensor3 out(fin.rows, fin.cols, schedule.feature_dim());
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const auto& res = schedule.at(i + 1);
    const auto& r = residuals[i];
    if (r.rows() != res.rows || r.cols() != res.cols || r.channels() != schedule.feature_dim()) {
      throw std::invalid_argument("accumulate: residual " + std::to_string(i + 1) +
                                  " does not match its scale");
    }
    out += upsample_nearest(r, fin.rows, fin.cols);
  }
  return out;
}

std::vector<double> ToyGeneratorParams::default_noise(std::size_t scales) {
  if (scales == 6) {
    return {0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
  }
  std::vector<double> out(scales);
  const double hi = std::log(0.5);
  const double lo = std::log(0.05);
  for (std::size_t k = 0; k < scales; ++k) {
    const double t = scales > 1 ? static_cast<double>(k) / static_cast<double>(scales - 1) : 0.0;
    out[k] = std::exp(hi + t * (lo - hi));
  }
  return out;
}

ToyGeneratorParams ToyGeneratorParams::defaults(std::size_t scales) {
  ToyGeneratorParams p;
  p.noise_scale = default_noise(scales);
  return p;
}

void ToyGeneratorParams::validate(std::size_t scales) const {
  if (noise_scale.size() != scales) {
    throw std::invalid_argument("ToyGeneratorParams: noise_scale needs one entry per scale (" +
                                std::to_string(scales) + ")");
  }
  for (double s : noise_scale) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("ToyGeneratorParams: noise_scale entries must be >= 0");
    }
  }
  if (!(drift > 0.0 && drift <= 1.0)) {
    throw std::invalid_argument("ToyGeneratorParams: drift must lie in (0, 1]");
  }
  if (!(pixel_decoder_gain > 0.0) || !std::isfinite(pixel_decoder_gain)) {
    throw std::invalid_argument("ToyGeneratorParams: pixel_decoder_gain must be positive");
  }
}

ToyGenerator::ToyGenerator(ScaleSchedule schedule, ToyGeneratorParams params, ToyPrompt prompt)
    : schedule_(std::move(schedule)), params_(std::move(params)), prompt_(std::move(prompt)) {
  params_.validate(schedule_.scale_count());
  const auto& fin = schedule_.final_resolution();
  const auto& target = prompt_.target;
  if (target.rows() == 0 || target.rows() % fin.rows != 0 || target.cols() % fin.cols != 0 ||
      target.rows() / fin.rows != target.cols() / fin.cols) {
    throw std::invalid_argument(
        "ToyGenerator: target must be an integer multiple (same on both axes) of the final "
        "token resolution");
  }
  for (double v : target.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("ToyGenerator: target values must lie in [0, 1]");
    }
  }
  patch_ = target.rows() / fin.rows;

  const Image tokens = downsample_box(target, fin.rows, fin.cols);
  const std::size_t d = schedule_.feature_dim();
  Tensor3 feature(fin.rows, fin.cols, d);
  for (std::size_t r = 0; r < fin.rows; ++r) {
    for (std::size_t c = 0; c < fin.cols; ++c) {
      for (std::size_t ch = 0; ch < d; ++ch) {
        feature.at(r, c, ch) = tokens.at(r, c) / params_.pixel_decoder_gain;
      }
    }
  }
  pyramid_.reserve(schedule_.scale_count());
  for (std::size_t k = 1; k < schedule_.scale_count(); ++k) {
    const auto& res = schedule_.at(k);
    pyramid_.push_back(downsample_box(feature, res.rows, res.cols));
  }
  pyramid_.push_back(std::move(feature));
}

Tensor3 ToyGenerator::sample_residual(const CandidatePath& context, std::size_t scale,
                                      Rng& rng) const {
  if (scale < 1 || scale > schedule_.scale_count()) {
    throw std::invalid_argument("ToyGenerator::sample_residual: scale " + std::to_string(scale) +
                                " out of range");
  }
  if (context.depth() + 1 < scale) {
    throw std::invalid_argument("ToyGenerator::sample_residual: context lacks scales below " +
                                std::to_string(scale));
  }
  const auto& res = schedule_.at(scale);
  const std::size_t d = schedule_.feature_dim();

  // Only residuals 1..scale-1 are read; anything deeper in the context is
  // ignored.
  Tensor3 current;
  if (scale == 1) {
    current = Tensor3(res.rows, res.cols, d);
  } else if (context.depth() == scale - 1) {
    current = downsample_box(context.accumulated, res.rows, res.cols);
  } else {
    const auto prefix = std::span<const Tensor3>(context.residuals).first(scale - 1);
    current = downsample_box(accumulate(prefix, schedule_), res.rows, res.cols);
  }

  const Tensor3& ideal = pyramid_[scale - 1];
  const double alpha = params_.drift;
  const double sigma = params_.noise_scale[scale - 1];
  Tensor3 out(res.rows, res.cols, d);
  auto ov = out.values();
  const auto iv = ideal.values();
  const auto cv = current.values();
  for (std::size_t i = 0; i < ov.size(); ++i) {
    ov[i] = alpha * (iv[i] - cv[i]);
    if (sigma > 0.0) {
      ov[i] += sigma * rng.normal();
    }
  }
  return out;
}

Image ToyGenerator::decode(const Tensor3& accumulated) const {
  const auto& fin = schedule_.final_resolution();
  if (accumulated.rows() != fin.rows || accumulated.cols() != fin.cols ||
      accumulated.channels() != schedule_.feature_dim()) {
    throw std::invalid_argument("ToyGenerator::decode: feature map shape mismatch");
  }
  const std::size_t d = accumulated.channels();
  Image tokens(fin.rows, fin.cols);
  for (std::size_t r = 0; r < fin.rows; ++r) {
    for (std::size_t c = 0; c < fin.cols; ++c) {
      double sum = 0.0;
      for (std::size_t ch = 0; ch < d; ++ch) {
        sum += accumulated.at(r, c, ch);
      }
      tokens.at(r, c) =
          std::clamp(sum / static_cast<double>(d) * params_.pixel_decoder_gain, 0.0, 1.0);
    }
  }
  if (patch_ == 1) {
    return tokens;
  }
  return upsample_nearest(tokens, fin.rows * patch_, fin.cols * patch_);
}

std::string_view to_string(TargetPattern pattern) {
  switch (pattern) {
    case TargetPattern::kAuto:
      return "auto";
    case TargetPattern::kBlobs:
      return "blobs";
    case TargetPattern::kStripes:
      return "stripes";
    case TargetPattern::kChecker:
      return "checker";
  }
  return "auto";
}

TargetPattern parse_target_pattern(std::string_view text) {
  if (text == "auto") return TargetPattern::kAuto;
  if (text == "blobs") return TargetPattern::kBlobs;
  if (text == "stripes") return TargetPattern::kStripes;
  if (text == "checker") return TargetPattern::kChecker;
  throw std::invalid_argument("unknown target pattern '" + std::string(text) + "'");
}

Image procedural_target(TargetPattern pattern, std::uint64_t seed, std::size_t rows,
                        std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("procedural_target: empty image");
  }
  if (pattern == TargetPattern::kAuto) {
    constexpr std::array<TargetPattern, 3> cycle = {TargetPattern::kBlobs, TargetPattern::kStripes,
                                                    TargetPattern::kChecker};
    pattern = cycle[seed % 3];
  }
  Rng rng(derive_stream(seed, StreamKind::kTarget, 0, 0));
  Image img(rows, cols);
  const auto fy = [&](std::size_t r) { return (static_cast<double>(r) + 0.5) / rows; };
  const auto fx = [&](std::size_t c) { return (static_cast<double>(c) + 0.5) / cols; };

  switch (pattern) {
    case TargetPattern::kBlobs: {
      const std::size_t count = 2 + rng.uniform_index(3);
      for (std::size_t b = 0; b < count; ++b) {
        const double cy = rng.uniform();
        const double cx = rng.uniform();
        const double width = 0.08 + 0.17 * rng.uniform();
        const double amp = 0.3 + 0.5 * rng.uniform();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) {
            const double dy = fy(r) - cy;
            const double dx = fx(c) - cx;
            img.at(r, c) += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
          }
        }
      }
      break;
    }
    case TargetPattern::kStripes: {
      const double theta = std::numbers::pi * rng.uniform();
      const double freq = 1.0 + 4.0 * rng.uniform();
      const double phase = 2.0 * std::numbers::pi * rng.uniform();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const double u = std::cos(theta) * fx(c) + std::sin(theta) * fy(r);
          img.at(r, c) = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * freq * u + phase);
        }
      }
      break;
    }
    case TargetPattern::kChecker:
    case TargetPattern::kAuto: {
      constexpr std::array<std::size_t, 3> cells = {2, 4, 8};
      const std::size_t n = cells[rng.uniform_index(cells.size())];
      const double hi = 0.5 + 0.5 * rng.uniform();
      const double lo = 0.3 * rng.uniform();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const std::size_t cr = r * n / rows;
          const std::size_t cc = c * n / cols;
          img.at(r, c) = ((cr + cc) % 2 == 0) ? hi : lo;
        }
      }
      break;
    }
  }
  for (auto& v : img.values()) {
    v = std::clamp(v, 0.0, 1.0);
  }
  return img;
}

}  // namespace varsearch
