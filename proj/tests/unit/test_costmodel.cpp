#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "varsearch/costmodel.hpp"

using namespace varsearch;

namespace {

const std::vector<std::uint64_t> kLadder{1, 2, 4, 6, 8, 12, 16, 20, 24, 32, 40, 48, 64};

std::vector<std::uint64_t> to_u64(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST(ScaleCost, UnitSequence) {
  const auto s = infinity_like_scales();
  const ModelDims dims;
  const auto c = scale_cost(s, BatchSchedule::constant(13, 1), dims, 1);
  const double h = 1024.0;
  EXPECT_EQ(c.flops, 24.0 * (4.0 * h + 16.0 * h * h));
  EXPECT_EQ(c.mem, 24.0 * (4.0 * h + 10.0 * h));
}

TEST(ScaleCost, LinearInBatch) {
  const auto s = toy_default_scales();
  const ModelDims dims{256, 4, 4};
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto one = scale_cost(s, BatchSchedule::constant(6, 3), dims, k);
    const auto two = scale_cost(s, BatchSchedule::constant(6, 6), dims, k);
    EXPECT_EQ(two.flops, 2 * one.flops);
    EXPECT_EQ(two.mem, 2 * one.mem);
  }
}

TEST(ScheduleCost, TotalsAreSums) {
  const auto s = infinity_like_scales();
  const auto r = schedule_cost(s, make_default_schedule(13, 2), ModelDims{});
  double f = 0, m = 0, peak = 0;
  for (std::size_t i = 0; i < 13; ++i) {
    f += r.per_scale_flops[i];
    m += r.per_scale_mem[i];
    peak = std::max(peak, r.per_scale_mem[i]);
  }
  EXPECT_EQ(r.total_flops, f);
  EXPECT_EQ(r.total_mem, m);
  EXPECT_EQ(r.peak_mem, peak);
}

TEST(ScheduleCost, FlopsStrictlyIncreaseAtConstantBatch) {
  const auto r = schedule_cost(infinity_like_scales(), BatchSchedule::constant(13, 1), ModelDims{});
  for (std::size_t i = 1; i < 13; ++i) EXPECT_GT(r.per_scale_flops[i], r.per_scale_flops[i - 1]);
}

TEST(ScheduleCost, MatchesIntegerSpreadsheet) {
  const auto s = infinity_like_scales();
  for (std::size_t n : {1u, 2u, 4u}) {
    const auto batch = make_default_schedule(13, n);
    const auto sheet = oracle::cost_sheet(kLadder, to_u64(batch.sizes()), 1024, 24);
    const auto r = schedule_cost(s, batch, ModelDims{});
    for (std::size_t i = 0; i < 13; ++i) {
      EXPECT_EQ(r.per_scale_flops[i], static_cast<double>(sheet[i].flops));
      EXPECT_EQ(r.per_scale_mem[i], static_cast<double>(sheet[i].mem));
    }
    EXPECT_EQ(r.total_flops, static_cast<double>(oracle::total_flops(sheet)));
  }
}

TEST(ScheduleCost, FinalScaleDominates) {
  const auto sheet =
      oracle::cost_sheet(kLadder, std::vector<std::uint64_t>(13, 1), 1024, 24);
  const auto r = schedule_cost(infinity_like_scales(), BatchSchedule::constant(13, 1), ModelDims{});
  EXPECT_EQ(r.per_scale_flops.back(), static_cast<double>(sheet.back().flops));
  EXPECT_GT(2 * sheet.back().flops, oracle::total_flops(sheet));
  EXPECT_GT(r.per_scale_flops.back() / r.total_flops, 0.5);
}

TEST(CompareSchedules, IdentityAndScaling) {
  const auto s = infinity_like_scales();
  const auto t = make_default_schedule(13, 1);
  const auto same = compare_schedules(t, t, s, ModelDims{});
  for (const auto& row : same.rows) {
    EXPECT_EQ(row.flops_ratio, 1.0);
    EXPECT_EQ(row.mem_ratio, 1.0);
  }
  const auto x1 = compare_schedules(BatchSchedule::constant(13, 1), t, s, ModelDims{});
  const auto x3 = compare_schedules(BatchSchedule::constant(13, 1), make_default_schedule(13, 3), s,
                                    ModelDims{});
  EXPECT_DOUBLE_EQ(x3.total_flops_ratio, 3 * x1.total_flops_ratio);
}

TEST(CompareSchedules, TemplateOverheadIsSmall) {
  const auto s = infinity_like_scales();
  const auto cmp =
      compare_schedules(BatchSchedule::constant(13, 1), make_default_schedule(13, 1), s, ModelDims{});
  const auto fixed = oracle::cost_sheet(kLadder, std::vector<std::uint64_t>(13, 1), 1024, 24);
  const auto adaptive =
      oracle::cost_sheet(kLadder, to_u64(make_default_schedule(13, 1).sizes()), 1024, 24);
  EXPECT_EQ(cmp.fixed.total_flops, static_cast<double>(oracle::total_flops(fixed)));
  EXPECT_EQ(cmp.adaptive.total_flops, static_cast<double>(oracle::total_flops(adaptive)));
  EXPECT_LE(cmp.total_flops_ratio, 1.35);
  EXPECT_GT(cmp.total_flops_ratio, 1.0);
}

TEST(CostCsv, ColumnsAndRows) {
  const auto s = infinity_like_scales();
  const auto b = make_default_schedule(13, 1);
  std::ostringstream out;
  write_cost_csv(out, s, b, schedule_cost(s, b, ModelDims{}));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "scale,tokens,cum_tokens,batch,flops,mem");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 13);
  EXPECT_NE(out.str().find("\n1,1,1,8,"), std::string::npos);
}

TEST(ModelDims, Validation) {
  EXPECT_THROW((ModelDims{0, 1, 1}.validate()), std::invalid_argument);
  EXPECT_THROW(scale_cost(toy_default_scales(), BatchSchedule::constant(5, 1), ModelDims{}, 1),
               std::invalid_argument);
}
