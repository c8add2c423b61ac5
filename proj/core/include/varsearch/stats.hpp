#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace varsearch {

double mean(std::span<const double> values);
double sample_variance(std::span<const double> values);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double mean_difference = 0.0;
  double p_two_sided = 1.0;
  double p_greater = 0.5;  // H1: mean(a) > mean(b)
};

/// Paired t-test on a[i] - b[i]. All-zero differences give t = 0, p = 1.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Welch's unequal-variance t-test.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct ConfidenceInterval {
  double estimate = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap CI of the mean; deterministic given `seed`.
ConfidenceInterval bootstrap_mean_ci(std::span<const double> values, double confidence = 0.95,
                                     std::size_t resamples = 10000, std::uint64_t seed = 0);

struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

/// Goodness of fit of observed counts against category probabilities.
ChiSquareResult chi_square_gof(std::span<const std::size_t> observed,
                               std::span<const double> probabilities);

}  // namespace varsearch
