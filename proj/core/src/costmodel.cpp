#include "varsearch/costmodel.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "varsearch/csv.hpp"

namespace varsearch {

void ModelDims::validate() const {
  if (hidden == 0 || layers == 0 || heads == 0) {
    throw std::invalid_argument("ModelDims: hidden, layers and heads must be positive");
  }
}

ScaleCost scale_cost(const ScaleSchedule& schedule, const BatchSchedule& batch,
                     const ModelDims& dims, std::size_t scale, const CostConstants& constants) {
  dims.validate();
  if (batch.scale_count() != schedule.scale_count()) {
    throw std::invalid_argument("scale_cost: batch and scale schedules differ in length");
  }
  const double t = static_cast<double>(schedule.token_count(scale));
  const double cum = static_cast<double>(schedule.cumulative_tokens(scale));
  const double b = static_cast<double>(batch.at(scale));
  const double h = static_cast<double>(dims.hidden);
  const double layers = static_cast<double>(dims.layers);
  ScaleCost out;
  out.flops = b * layers * (constants.c_attn * t * cum * h + constants.c_mlp * t * h * h);
  out.mem = b * layers * (constants.kv_bytes * cum * h + constants.act_bytes * t * h);
  return out;
}

CostReport schedule_cost(const ScaleSchedule& schedule, const BatchSchedule& batch,
                         const ModelDims& dims, const CostConstants& constants) {
  CostReport report;
  for (std::size_t k = 1; k <= schedule.scale_count(); ++k) {
    const auto c = scale_cost(schedule, batch, dims, k, constants);
    report.per_scale_flops.push_back(c.flops);
    report.per_scale_mem.push_back(c.mem);
    report.total_flops += c.flops;
    report.total_mem += c.mem;
    report.peak_mem = std::max(report.peak_mem, c.mem);
  }
  return report;
}

ScheduleComparison compare_schedules(const BatchSchedule& fixed, const BatchSchedule& adaptive,
                                     const ScaleSchedule& schedule, const ModelDims& dims,
                                     const CostConstants& constants) {
  ScheduleComparison out;
  out.fixed = schedule_cost(schedule, fixed, dims, constants);
  out.adaptive = schedule_cost(schedule, adaptive, dims, constants);
  for (std::size_t k = 1; k <= schedule.scale_count(); ++k) {
    ComparisonRow row;
    row.scale = k;
    row.tokens = schedule.token_count(k);
    row.cum_tokens = schedule.cumulative_tokens(k);
    row.fixed_batch = fixed.at(k);
    row.fixed_flops = out.fixed.per_scale_flops[k - 1];
    row.fixed_mem = out.fixed.per_scale_mem[k - 1];
    row.adaptive_batch = adaptive.at(k);
    row.adaptive_flops = out.adaptive.per_scale_flops[k - 1];
    row.adaptive_mem = out.adaptive.per_scale_mem[k - 1];
    row.flops_ratio = row.adaptive_flops / row.fixed_flops;
    row.mem_ratio = row.adaptive_mem / row.fixed_mem;
    out.rows.push_back(row);
  }
  out.total_flops_ratio = out.adaptive.total_flops / out.fixed.total_flops;
  out.total_mem_ratio = out.adaptive.total_mem / out.fixed.total_mem;
  out.peak_mem_ratio = out.adaptive.peak_mem / out.fixed.peak_mem;
  return out;
}

void write_cost_csv(std::ostream& out, const ScaleSchedule& schedule, const BatchSchedule& batch,
                    const CostReport& report) {
  CsvWriter csv(out);
  csv.row("scale", "tokens", "cum_tokens", "batch", "flops", "mem");
  for (std::size_t k = 1; k <= schedule.scale_count(); ++k) {
    csv.row(k, schedule.token_count(k), schedule.cumulative_tokens(k), batch.at(k),
            report.per_scale_flops[k - 1], report.per_scale_mem[k - 1]);
  }
}

void write_comparison_csv(std::ostream& out, const ScheduleComparison& comparison) {
  CsvWriter csv(out);
  csv.row("scale", "tokens", "cum_tokens", "fixed_batch", "fixed_flops", "fixed_mem",
          "adaptive_batch", "adaptive_flops", "adaptive_mem", "flops_ratio", "mem_ratio");
  for (const auto& r : comparison.rows) {
    csv.row(r.scale, r.tokens, r.cum_tokens, r.fixed_batch, r.fixed_flops, r.fixed_mem,
            r.adaptive_batch, r.adaptive_flops, r.adaptive_mem, r.flops_ratio, r.mem_ratio);
  }
}

}  // namespace varsearch
