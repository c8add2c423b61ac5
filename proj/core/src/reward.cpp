#include "varsearch/reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace varsearch {

ToyReward::ToyReward(std::vector<double> noise_by_scale)
    : noise_by_scale_(std::move(noise_by_scale)) {
  for (double s : noise_by_scale_) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("ToyReward: noise_by_scale entries must be >= 0");
    }
  }
}

double ToyReward::ground_truth(const Image& image, const ToyPrompt& prompt) {
  return -mean_squared_error(image, prompt.target);
}

double ToyReward::score(const Image& image, const ToyPrompt& prompt,
                        const ScoreContext& context) const {
  double value = ground_truth(image, prompt);
  if (context.noise_stream && context.scale >= 1 && context.scale <= noise_by_scale_.size()) {
    const double sigma = noise_by_scale_[context.scale - 1];
    if (sigma > 0.0) {
      Rng rng(*context.noise_stream);
      value += sigma * rng.normal();
    }
  }
  return value;
}

std::vector<double> normalized_average(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("normalized_average: batch size mismatch");
  }
  const auto normalize = [](std::span<const double> v) {
    std::vector<double> out(v.size(), 0.5);
    if (v.empty()) return out;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi > *lo) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = (v[i] - *lo) / (*hi - *lo);
      }
    }
    return out;
  };
  auto na = normalize(a);
  const auto nb = normalize(b);
  for (std::size_t i = 0; i < na.size(); ++i) {
    na[i] = 0.5 * (na[i] + nb[i]);
  }
  return na;
}

double log_potential(std::span<const double> history, const PotentialSpec& spec) {
  if (history.empty()) {
    throw std::invalid_argument("log_potential: empty reward history");
  }
  spec.validate();
  double functional = 0.0;
  switch (spec.kind) {
    case PotentialKind::kValue:
      functional = history.back();
      break;
    case PotentialKind::kDiff:
      functional = history.size() >= 2 ? history.back() - history[history.size() - 2]
                                       : history.back();
      break;
    case PotentialKind::kMax:
      functional = *std::max_element(history.begin(), history.end());
      break;
    case PotentialKind::kSum:
      functional = std::accumulate(history.begin(), history.end(), 0.0);
      break;
  }
  if (spec.lambda == 0.0) {
    return 0.0;
  }
  return spec.lambda * functional;
}

std::vector<double> resample_weights(std::span<const double> log_potentials) {
  if (log_potentials.empty()) {
    throw std::invalid_argument("resample_weights: no candidates");
  }
  double hi = -std::numeric_limits<double>::infinity();
  for (double lp : log_potentials) {
    if (!std::isfinite(lp)) {
      throw std::invalid_argument("resample_weights: non-finite log-potential");
    }
    hi = std::max(hi, lp);
  }
  std::vector<double> w(log_potentials.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_potentials[i] - hi);
    total += w[i];
  }
  for (auto& x : w) {
    x /= total;
  }
  return w;
}

PotentialResult compute_potentials(std::span<const std::vector<double>> histories,
                                   const PotentialSpec& spec) {
  PotentialResult out;
  out.raw_scores.reserve(histories.size());
  out.log_potentials.reserve(histories.size());
  for (const auto& h : histories) {
    if (h.empty()) {
      throw std::invalid_argument("compute_potentials: candidate without reward history");
    }
    out.raw_scores.push_back(h.back());
    out.log_potentials.push_back(log_potential(h, spec));
  }
  out.weights = resample_weights(out.log_potentials);
  return out;
}

std::vector<std::size_t> multinomial_select(std::span<const double> weights, std::size_t count,
                                            Rng& rng) {
  if (count < 1) {
    throw std::invalid_argument("multinomial_select: count must be >= 1");
  }
  if (weights.empty()) {
    throw std::invalid_argument("multinomial_select: empty weight vector");
  }
  std::vector<double> cdf(weights.size());
  double running = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("multinomial_select: weights must be finite and >= 0");
    }
    running += weights[i];
    cdf[i] = running;
    if (weights[i] > 0.0) {
      last_positive = i;
    }
  }
  if (last_positive == weights.size()) {
    throw std::invalid_argument("multinomial_select: all weights are zero");
  }
  std::vector<std::size_t> out(count);
  for (auto& idx : out) {
    const double x = rng.uniform() * running;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    idx = std::min(static_cast<std::size_t>(it - cdf.begin()), last_positive);
  }
  return out;
}

std::size_t importance_sampling_baseline(std::span<const double> finals, double lambda,
                                         Rng& rng) {
  PotentialSpec spec{PotentialKind::kValue, lambda};
  std::vector<double> lp;
  lp.reserve(finals.size());
  for (double r : finals) {
    lp.push_back(log_potential(std::span<const double>(&r, 1), spec));
  }
  const auto w = resample_weights(lp);
  return multinomial_select(w, 1, rng).front();
}

std::size_t argmax_lowest(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("argmax_lowest: empty input");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
    }
  }
  return best;
}

}  // namespace varsearch
