#pragma once

// Independent reference implementations used by unit and acceptance tests.
// None of these call into the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "varsearch/tensor.hpp"

namespace oracle {

// Sum of residuals, each replicated by explicit index arithmetic.
inline varsearch::Tensor3 accumulate(const std::vector<varsearch::Tensor3>& residuals,
                                     std::size_t rows, std::size_t cols, std::size_t d) {
  varsearch::Tensor3 f(rows, cols, d);
  for (const auto& r : residuals) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t ch = 0; ch < d; ++ch) {
          f.at(i, j, ch) += r.at(i * r.rows() / rows, j * r.cols() / cols, ch);
        }
      }
    }
  }
  return f;
}

// Log-potentials written straight from the four formulas.
inline double value(const std::vector<double>& h, double lambda) { return lambda * h.back(); }
inline double diff(const std::vector<double>& h, double lambda) {
  if (h.size() < 2) return lambda * h.back();
  return lambda * (h[h.size() - 1] - h[h.size() - 2]);
}
inline double max(const std::vector<double>& h, double lambda) {
  double m = h[0];
  for (double v : h) m = v > m ? v : m;
  return lambda * m;
}
inline double sum(const std::vector<double>& h, double lambda) {
  double s = 0.0;
  for (double v : h) s += v;
  return lambda * s;
}

// Sum of squared distances of each group's points to the group mean.
inline double partition_wcss(const Eigen::MatrixXd& pts, const std::vector<int>& label, int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(pts.cols());
    int count = 0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (label[static_cast<std::size_t>(i)] == c) {
        mean += pts.row(i);
        ++count;
      }
    }
    if (count == 0) return std::numeric_limits<double>::infinity();
    mean /= count;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (label[static_cast<std::size_t>(i)] == c) total += (pts.row(i) - mean).squaredNorm();
    }
  }
  return total;
}

// Minimum WCSS over every partition into exactly k nonempty groups
// (restricted growth strings).
inline double optimal_wcss(const Eigen::MatrixXd& pts, int k) {
  const int n = static_cast<int>(pts.rows());
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, int i, int used) -> void {
    if (n - i < k - used) return;
    if (i == n) {
      if (used == k) best = std::min(best, partition_wcss(pts, label, k));
      return;
    }
    for (int c = 0; c <= std::min(used, k - 1); ++c) {
      label[static_cast<std::size_t>(i)] = c;
      self(self, i + 1, std::max(used, c + 1));
    }
  };
  rec(rec, 0, 0);
  return best;
}

// Cost spreadsheet in exact integer arithmetic: one row per scale with
// tokens t, cumulative T and batch b.
struct CostRow {
  std::uint64_t tokens;
  std::uint64_t cum;
  std::uint64_t batch;
  std::uint64_t flops;
  std::uint64_t mem;
};

inline std::vector<CostRow> cost_sheet(const std::vector<std::uint64_t>& sides,
                                       const std::vector<std::uint64_t>& batch,
                                       std::uint64_t hidden, std::uint64_t layers) {
  std::vector<CostRow> rows;
  std::uint64_t cum = 0;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    const std::uint64_t t = sides[i] * sides[i];
    cum += t;
    CostRow r{t, cum, batch[i], 0, 0};
    r.flops = batch[i] * layers * (4 * t * cum * hidden + 16 * t * hidden * hidden);
    r.mem = batch[i] * layers * (4 * cum * hidden + 10 * t * hidden);
    rows.push_back(r);
  }
  return rows;
}

inline std::uint64_t total_flops(const std::vector<CostRow>& rows) {
  std::uint64_t s = 0;
  for (const auto& r : rows) s += r.flops;
  return s;
}

}  // namespace oracle
