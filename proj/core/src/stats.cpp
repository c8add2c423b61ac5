#include "varsearch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "varsearch/rng.hpp"

namespace varsearch {

namespace {

void require_samples(std::span<const double> v, std::size_t at_least, const char* who) {
  if (v.size() < at_least) {
    throw std::invalid_argument(std::string(who) + ": need at least " + std::to_string(at_least) +
                                " samples");
  }
}

TTestResult finish_t(double t, double df, double diff) {
  TTestResult r;
  r.t = t;
  r.df = df;
  r.mean_difference = diff;
  if (std::isnan(t)) {
    return r;
  }
  if (std::isinf(t)) {
    r.p_two_sided = 0.0;
    r.p_greater = t > 0 ? 0.0 : 1.0;
    return r;
  }
  const boost::math::students_t dist(df);
  r.p_greater = boost::math::cdf(boost::math::complement(dist, t));
  r.p_two_sided = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  return r;
}

}  // namespace

double mean(std::span<const double> values) {
  require_samples(values, 1, "mean");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  require_samples(values, 2, "sample_variance");
  const double m = mean(values);
  double acc = 0.0;
  for (double v : values) {
    acc += (v - m) * (v - m);
  }
  return acc / static_cast<double>(values.size() - 1);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("paired_t_test: samples differ in length");
  }
  require_samples(a, 2, "paired_t_test");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff[i] = a[i] - b[i];
  }
  const double m = mean(diff);
  const double var = sample_variance(diff);
  const double df = static_cast<double>(diff.size() - 1);
  if (var == 0.0) {
    if (m == 0.0) {
      TTestResult r;
      r.df = df;
      return r;
    }
    return finish_t(m > 0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity(),
                    df, m);
  }
  return finish_t(m / std::sqrt(var / static_cast<double>(diff.size())), df, m);
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  require_samples(a, 2, "welch_t_test");
  require_samples(b, 2, "welch_t_test");
  const double ma = mean(a);
  const double mb = mean(b);
  const double va = sample_variance(a) / static_cast<double>(a.size());
  const double vb = sample_variance(b) / static_cast<double>(b.size());
  const double se2 = va + vb;
  if (se2 == 0.0) {
    if (ma == mb) {
      TTestResult r;
      r.df = static_cast<double>(a.size() + b.size() - 2);
      return r;
    }
    return finish_t(ma > mb ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity(),
                    static_cast<double>(a.size() + b.size() - 2), ma - mb);
  }
  const double df = se2 * se2 /
                    (va * va / static_cast<double>(a.size() - 1) +
                     vb * vb / static_cast<double>(b.size() - 1));
  return finish_t((ma - mb) / std::sqrt(se2), df, ma - mb);
}

ConfidenceInterval bootstrap_mean_ci(std::span<const double> values, double confidence,
                                     std::size_t resamples, std::uint64_t seed) {
  require_samples(values, 1, "bootstrap_mean_ci");
  if (!(confidence > 0.0 && confidence < 1.0) || resamples < 1) {
    throw std::invalid_argument("bootstrap_mean_ci: bad confidence or resample count");
  }
  Rng rng(derive_stream(seed, StreamKind::kBootstrap, 0, 0));
  std::vector<double> means(resamples);
  const std::size_t n = values.size();
  for (auto& m : means) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += values[rng.uniform_index(n)];
    }
    m = acc / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - confidence) / 2.0;
  const auto pick = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1)));
    return means[std::min(idx, resamples - 1)];
  };
  return {mean(values), pick(tail), pick(1.0 - tail)};
}

ChiSquareResult chi_square_gof(std::span<const std::size_t> observed,
                               std::span<const double> probabilities) {
  if (observed.size() != probabilities.size() || observed.size() < 2) {
    throw std::invalid_argument("chi_square_gof: need matching categories (>= 2)");
  }
  const double total =
      static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::size_t{0}));
  ChiSquareResult r;
  std::size_t used = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probabilities[i] * total;
    if (expected <= 0.0) {
      if (observed[i] != 0) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
      }
      continue;
    }
    const double d = static_cast<double>(observed[i]) - expected;
    r.statistic += d * d / expected;
    ++used;
  }
  r.df = static_cast<double>(used - 1);
  if (r.df < 1.0) {
    return r;
  }
  const boost::math::chi_squared dist(r.df);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace varsearch
