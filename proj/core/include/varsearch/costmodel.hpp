#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "varsearch/schedule.hpp"

namespace varsearch {

struct ModelDims {
  std::size_t hidden = 1024;
  std::size_t layers = 24;
  std::size_t heads = 16;

  void validate() const;
};

/// Per-token accounting constants.
///
/// FLOPs per layer at scale k: c_attn * t_k * T_k * hidden (QK^T and AV over
/// the cached sequence, 2 flops per MAC) + c_mlp * t_k * hidden^2 (4x MLP,
/// two matmuls). Bytes per layer: kv_bytes * T_k * hidden (bf16 K and V)
/// + act_bytes * t_k * hidden (bf16 hidden state plus the 4x MLP
/// intermediate). Parameters are excluded.
struct CostConstants {
  double c_attn = 4.0;
  double c_mlp = 16.0;
  double kv_bytes = 4.0;
  double act_bytes = 10.0;
};

struct ScaleCost {
  double flops = 0.0;
  double mem = 0.0;
};

struct CostReport {
  std::vector<double> per_scale_flops;
  std::vector<double> per_scale_mem;
  double total_flops = 0.0;
  double total_mem = 0.0;
  double peak_mem = 0.0;
};

ScaleCost scale_cost(const ScaleSchedule& schedule, const BatchSchedule& batch,
                     const ModelDims& dims, std::size_t scale, const CostConstants& constants = {});

CostReport schedule_cost(const ScaleSchedule& schedule, const BatchSchedule& batch,
                         const ModelDims& dims, const CostConstants& constants = {});

struct ComparisonRow {
  std::size_t scale = 0;
  std::size_t tokens = 0;
  std::size_t cum_tokens = 0;
  std::size_t fixed_batch = 0;
  double fixed_flops = 0.0;
  double fixed_mem = 0.0;
  std::size_t adaptive_batch = 0;
  double adaptive_flops = 0.0;
  double adaptive_mem = 0.0;
  double flops_ratio = 0.0;  // adaptive / fixed
  double mem_ratio = 0.0;
};

struct ScheduleComparison {
  std::vector<ComparisonRow> rows;
  CostReport fixed;
  CostReport adaptive;
  double total_flops_ratio = 0.0;
  double total_mem_ratio = 0.0;
  double peak_mem_ratio = 0.0;
};

ScheduleComparison compare_schedules(const BatchSchedule& fixed, const BatchSchedule& adaptive,
                                     const ScaleSchedule& schedule, const ModelDims& dims,
                                     const CostConstants& constants = {});

/// Columns: scale,tokens,cum_tokens,batch,flops,mem
void write_cost_csv(std::ostream& out, const ScaleSchedule& schedule, const BatchSchedule& batch,
                    const CostReport& report);

/// Columns: scale,tokens,cum_tokens,fixed_batch,fixed_flops,fixed_mem,
/// adaptive_batch,adaptive_flops,adaptive_mem,flops_ratio,mem_ratio
void write_comparison_csv(std::ostream& out, const ScheduleComparison& comparison);

}  // namespace varsearch
