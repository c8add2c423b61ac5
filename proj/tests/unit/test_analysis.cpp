#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "varsearch/analysis.hpp"
#include "varsearch/stats.hpp"

using namespace varsearch;

namespace {

ExperimentConfig small_config(std::size_t replicates) {
  ExperimentConfig c;
  c.replicates = replicates;
  return c;
}

}  // namespace

// Reference values from scipy.stats (ttest_rel, ttest_ind with
// equal_var=False, chisquare).
TEST(Stats, MatchesReferenceValues) {
  const std::vector<double> a{1.2, 0.8, 1.9, 1.4, 0.7, 1.1, 1.6, 1.0};
  const std::vector<double> b{1.0, 0.9, 1.2, 1.1, 0.8, 0.7, 1.3, 1.1};
  const auto p = paired_t_test(a, b);
  EXPECT_NEAR(p.t, 1.9652147377620695, 1e-12);
  EXPECT_NEAR(p.p_two_sided, 0.09012451886639246, 1e-10);
  EXPECT_NEAR(p.p_greater, 0.04506225943319623, 1e-10);
  const auto w = welch_t_test(a, b);
  EXPECT_NEAR(w.t, 1.24830319616879, 1e-12);
  EXPECT_NEAR(w.p_two_sided, 0.23952392872495076, 1e-10);
  const std::vector<std::size_t> obs{18, 22, 35, 25};
  const std::vector<double> prob(4, 0.25);
  const auto c = chi_square_gof(obs, prob);
  EXPECT_NEAR(c.statistic, 6.32, 1e-12);
  EXPECT_NEAR(c.p_value, 0.09703806460956206, 1e-10);
}

TEST(Stats, IdenticalSamplesGivePOne) {
  const std::vector<double> a{0.1, 0.5, 0.2, 0.9};
  EXPECT_EQ(paired_t_test(a, a).p_two_sided, 1.0);
}

TEST(Stats, ShiftedSamplesAreSignificant) {
  Rng rng(derive_stream(3, StreamKind::kBootstrap, 0, 0));
  std::vector<double> a(500), b(500);
  for (std::size_t i = 0; i < 500; ++i) {
    b[i] = rng.normal();
    a[i] = b[i] + 1.0 + 0.5 * rng.normal();
  }
  EXPECT_LT(paired_t_test(a, b).p_greater, 0.01);
  EXPECT_LT(welch_t_test(a, b).p_greater, 0.01);
}

TEST(Stats, BootstrapIsSeededAndBracketsMean) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto a = bootstrap_mean_ci(v, 0.95, 10000, 4);
  const auto b = bootstrap_mean_ci(v, 0.95, 10000, 4);
  EXPECT_EQ(a.low, b.low);
  EXPECT_EQ(a.high, b.high);
  EXPECT_DOUBLE_EQ(a.estimate, 5.5);
  EXPECT_LT(a.low, 5.5);
  EXPECT_GT(a.high, 5.5);
  EXPECT_THROW(bootstrap_mean_ci(std::vector<double>{}, 0.95, 10, 0), std::invalid_argument);
}

TEST(Consistency, SingleCandidateIsAlwaysConsistent) {
  const auto runs = full_width_runs(small_config(1), 1, 20);
  const auto curve = consistency(runs, {PotentialKind::kValue, 10.0});
  for (double v : curve.per_scale) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(curve.candidate_count, 1u);
}

TEST(Consistency, FinalScaleValueIsOne) {
  const auto runs = full_width_runs(small_config(1), 4, 50);
  const auto curve = consistency(runs, {PotentialKind::kValue, 10.0});
  ASSERT_EQ(curve.per_scale.size(), 6u);
  EXPECT_EQ(curve.per_scale.back(), 1.0);
  for (double v : curve.per_scale) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Consistency, RejectsMixedWidths) {
  auto runs = full_width_runs(small_config(1), 4, 2);
  const auto other = full_width_runs(small_config(1), 2, 1);
  runs.push_back(other[0]);
  EXPECT_THROW(consistency(runs, {PotentialKind::kValue, 10.0}), std::invalid_argument);
  EXPECT_THROW(consistency({}, {PotentialKind::kValue, 10.0}), std::invalid_argument);
}

TEST(Sweep, SingleValueMatchesDirectRuns) {
  const auto base = small_config(5);
  const std::vector<std::string> values{"3,4"};
  const auto table = sweep(SweepAxis::kResamplingScales, values, base);
  ASSERT_EQ(table.rows.size(), 1u);
  ExperimentConfig direct = base;
  direct.resample_scales = std::set<std::size_t>{3, 4};
  for (std::size_t r = 0; r < 5; ++r) {
    EXPECT_EQ(table.rows[0].samples[r], run_experiment(direct, r).selected_true_reward());
  }
  EXPECT_EQ(table.rows[0].mean_events_cluster, 2.0);
  EXPECT_EQ(table.rows[0].mean_events_resample, 2.0);
}

TEST(Sweep, CsvIsByteIdenticalAcrossRunsAndWorkers) {
  const auto base = small_config(6);
  const std::vector<std::string> values{"0", "0.1", "1", "10"};
  std::ostringstream a, b;
  write_sweep_csv(a, sweep(SweepAxis::kLambda, values, base, 1));
  write_sweep_csv(b, sweep(SweepAxis::kLambda, values, base, 3));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "axis,value,strategy,replicates,mean,ci_low,ci_high,cluster_events,resample_events,"
            "truncate_events");
}

TEST(Sweep, SmallLambdasDoNotHurt) {
  const auto base = small_config(200);
  const std::vector<std::string> values{"0", "0.1", "1", "10"};
  const auto table = sweep(SweepAxis::kLambda, values, base);
  const auto& zero = table.rows[0].reward;
  const auto& one = table.rows[2].reward;
  EXPECT_GE(one.estimate, zero.estimate - (zero.high - zero.low) / 2);
}

TEST(Sweep, AxisNames) {
  for (auto axis : {SweepAxis::kResamplingScales, SweepAxis::kClusteringScales,
                    SweepAxis::kPotential, SweepAxis::kLambda, SweepAxis::kExtractor,
                    SweepAxis::kN}) {
    EXPECT_EQ(parse_sweep_axis(to_string(axis)), axis);
  }
  EXPECT_THROW(parse_sweep_axis("temperature"), std::invalid_argument);
  const std::vector<std::string> none;
  EXPECT_THROW(sweep(SweepAxis::kLambda, none, small_config(1)), std::invalid_argument);
}

TEST(Summarize, GroupsAndPairs) {
  const auto base = small_config(30);
  std::vector<RunRecord> records;
  for (auto s : {Strategy::kBon, Strategy::kRaw}) {
    ExperimentConfig c = base;
    c.strategy = s;
    for (std::size_t r = 0; r < 30; ++r) {
      records.push_back(parse_record(render_record(c, r, run_experiment(c, r))));
    }
  }
  const auto summary = summarize(records, 1);
  ASSERT_EQ(summary.groups.size(), 2u);
  EXPECT_EQ(summary.groups[0].label, "bon/n=4");
  EXPECT_EQ(summary.groups[1].label, "raw/n=4");
  ASSERT_EQ(summary.comparisons.size(), 1u);
  EXPECT_EQ(summary.comparisons[0].pairs, 30u);
  EXPECT_GT(summary.comparisons[0].paired.mean_difference, 0.0);
  std::ostringstream a, b;
  write_summary_csv(a, summary);
  write_summary_csv(b, summarize(records, 1));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Summarize, IdenticalGroupsGivePOne) {
  ExperimentConfig c = small_config(10);
  std::vector<RunRecord> records;
  for (std::size_t r = 0; r < 10; ++r) {
    const auto run = run_experiment(c, r);
    records.push_back(parse_record(render_record(c, r, run)));
  }
  auto copy = records;
  for (auto& r : copy) r.config.n = 5;  // same outcomes under a second label
  records.insert(records.end(), copy.begin(), copy.end());
  const auto summary = summarize(records);
  ASSERT_EQ(summary.comparisons.size(), 1u);
  EXPECT_EQ(summary.comparisons[0].paired.p_two_sided, 1.0);
}

TEST(Summarize, EmptyInputThrows) {
  EXPECT_THROW(summarize(std::vector<RunRecord>{}), std::invalid_argument);
}
