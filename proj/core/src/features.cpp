#include "varsearch/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "varsearch/reward.hpp"

namespace varsearch {

namespace {

void check_variant(const Image& image, const ExtractorVariant& v) {
  if (v.grid_rows == 0 || v.grid_cols == 0 || v.sub == 0) {
    throw std::invalid_argument("extract: grid and sub must be positive");
  }
  if (image.rows() % v.grid_rows != 0 || image.cols() % v.grid_cols != 0) {
    throw std::invalid_argument("extract: patch grid " + std::to_string(v.grid_rows) + "x" +
                                std::to_string(v.grid_cols) + " does not divide image " +
                                std::to_string(image.rows()) + "x" + std::to_string(image.cols()));
  }
  const std::size_t pr = image.rows() / v.grid_rows;
  const std::size_t pc = image.cols() / v.grid_cols;
  if (v.tag != ExtractorTag::kRawDownsample && (pr % v.sub != 0 || pc % v.sub != 0)) {
    throw std::invalid_argument("extract: sub-cell grid does not divide the patch");
  }
}

double squared_distance(const Eigen::MatrixXd& a, Eigen::Index row_a, const Eigen::MatrixXd& b,
                        Eigen::Index row_b) {
  return (a.row(row_a) - b.row(row_b)).squaredNorm();
}

// Nearest centroid per point, ties to the lowest centroid index.
void assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
                    std::vector<std::size_t>& assignments) {
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(points, i, centroids, c);
      if (d < best) {
        best = d;
        best_c = static_cast<std::size_t>(c);
      }
    }
    assignments[static_cast<std::size_t>(i)] = best_c;
  }
}

void repair_empty_clusters(const Eigen::MatrixXd& points, Eigen::MatrixXd& centroids,
                           std::vector<std::size_t>& assignments) {
  const auto k = static_cast<std::size_t>(centroids.rows());
  std::vector<std::size_t> sizes(k, 0);
  for (auto a : assignments) {
    ++sizes[a];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    double far = -1.0;
    std::size_t far_i = 0;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (sizes[assignments[i]] < 2) continue;
      const double d = squared_distance(points, static_cast<Eigen::Index>(i), centroids,
                                        static_cast<Eigen::Index>(assignments[i]));
      if (d > far) {
        far = d;
        far_i = i;
      }
    }
    --sizes[assignments[far_i]];
    assignments[far_i] = c;
    sizes[c] = 1;
    centroids.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(far_i));
  }
}

Eigen::MatrixXd cluster_means(const Eigen::MatrixXd& points,
                              std::span<const std::size_t> assignments, std::size_t k) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), points.cols());
  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    sums.row(static_cast<Eigen::Index>(assignments[i])) += points.row(static_cast<Eigen::Index>(i));
    counts[assignments[i]] += 1.0;
  }
  for (std::size_t c = 0; c < k; ++c) {
    sums.row(static_cast<Eigen::Index>(c)) /= counts[c];
  }
  return sums;
}

}  // namespace

Eigen::MatrixXd patch_features(const Image& image, const ExtractorVariant& v) {
  check_variant(image, v);
  const std::size_t pr = image.rows() / v.grid_rows;
  const std::size_t pc = image.cols() / v.grid_cols;
  const std::size_t cr = pr / v.sub;
  const std::size_t cc = pc / v.sub;
  const double cell_area = static_cast<double>(cr * cc);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(v.grid_rows * v.grid_cols),
                      static_cast<Eigen::Index>(v.embed_dim()));
  for (std::size_t gr = 0; gr < v.grid_rows; ++gr) {
    for (std::size_t gc = 0; gc < v.grid_cols; ++gc) {
      const auto patch = static_cast<Eigen::Index>(gr * v.grid_cols + gc);
      for (std::size_t sr = 0; sr < v.sub; ++sr) {
        for (std::size_t sc = 0; sc < v.sub; ++sc) {
          double sum = 0.0;
          for (std::size_t r = 0; r < cr; ++r) {
            for (std::size_t c = 0; c < cc; ++c) {
              sum += image.at(gr * pr + sr * cr + r, gc * pc + sc * cc + c);
            }
          }
          out(patch, static_cast<Eigen::Index>(sr * v.sub + sc)) = sum / cell_area;
        }
      }
    }
  }
  return out;
}

EmbeddingSet extract(std::span<const Image> images, const ExtractorVariant& variant,
                     std::size_t source_scale) {
  if (images.empty()) {
    throw std::invalid_argument("extract: no images");
  }
  const std::size_t rows = images.front().rows();
  const std::size_t cols = images.front().cols();
  for (const auto& img : images) {
    if (img.rows() != rows || img.cols() != cols) {
      throw std::invalid_argument("extract: images must share one shape");
    }
  }
  check_variant(images.front(), variant);

  const std::size_t patches = variant.grid_rows * variant.grid_cols;
  const std::size_t width =
      variant.tag == ExtractorTag::kPooled ? variant.embed_dim() : patches;
  if (variant.tag == ExtractorTag::kPatchPca && patches < 2) {
    throw std::invalid_argument("extract: PATCH_PCA needs at least two patches");
  }

  EmbeddingSet out;
  out.source_scale = source_scale;
  out.vectors.resize(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    switch (variant.tag) {
      case ExtractorTag::kPatchPca: {
        const Eigen::MatrixXd proj = pca_project(patch_features(images[i], variant), 1);
        out.vectors.row(row) = proj.col(0).transpose();
        break;
      }
      case ExtractorTag::kPooled:
        out.vectors.row(row) = patch_features(images[i], variant).colwise().mean();
        break;
      case ExtractorTag::kRawDownsample: {
        const Image small = downsample_box(images[i], variant.grid_rows, variant.grid_cols);
        for (std::size_t j = 0; j < small.size(); ++j) {
          out.vectors(row, static_cast<Eigen::Index>(j)) = small.values()[j];
        }
        break;
      }
    }
  }
  return out;
}

Eigen::MatrixXd pca_components(const Eigen::MatrixXd& data, std::size_t components) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto m = static_cast<std::size_t>(data.cols());
  if (n < 2) {
    throw std::invalid_argument("pca_project: at least two rows are required");
  }
  if (components < 1 || components > std::min(n, m)) {
    throw std::invalid_argument("pca_project: components must lie in 1..min(n, m)");
  }
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("pca_project: eigendecomposition failed");
  }
  // Eigenvalues come back ascending.
  Eigen::MatrixXd axes(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(components));
  for (std::size_t q = 0; q < components; ++q) {
    Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(m - 1 - q));
    Eigen::Index lead = 0;
    for (Eigen::Index j = 1; j < v.size(); ++j) {
      if (std::abs(v(j)) > std::abs(v(lead))) {
        lead = j;
      }
    }
    if (v(lead) < 0.0) {
      v = -v;
    }
    axes.col(static_cast<Eigen::Index>(q)) = v;
  }
  return axes;
}

Eigen::MatrixXd pca_project(const Eigen::MatrixXd& data, std::size_t components) {
  const Eigen::MatrixXd axes = pca_components(data, components);
  const Eigen::RowVectorXd mean = data.colwise().mean();
  return (data.rowwise() - mean) * axes;
}

double within_cluster_ss(const Eigen::MatrixXd& points, std::span<const std::size_t> assignments,
                         const Eigen::MatrixXd& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    total += squared_distance(points, static_cast<Eigen::Index>(i), centroids,
                              static_cast<Eigen::Index>(assignments[i]));
  }
  return total;
}

namespace {

ClusterResult kmeanspp_once(const Eigen::MatrixXd& points, std::size_t k, Rng& rng,
                            const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  ClusterResult out;
  out.centroids.resize(static_cast<Eigen::Index>(k), points.cols());

  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  auto take = [&](std::size_t idx) {
    chosen[idx] = true;
    out.seeds.push_back(idx);
    const auto c = static_cast<Eigen::Index>(out.seeds.size() - 1);
    out.centroids.row(c) = points.row(static_cast<Eigen::Index>(idx));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points, static_cast<Eigen::Index>(i), out.centroids, c));
    }
  };
  take(rng.uniform_index(n));
  while (out.seeds.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (total > 0.0) {
      take(multinomial_select(d2, 1, rng).front());
    } else {
      const auto it = std::find(chosen.begin(), chosen.end(), false);
      take(static_cast<std::size_t>(it - chosen.begin()));
    }
  }

  out.assignments.assign(n, 0);
  assign_nearest(points, out.centroids, out.assignments);
  out.seeding_wcss = within_cluster_ss(points, out.assignments, out.centroids);

  for (out.iterations = 0; out.iterations < options.max_iterations;) {
    repair_empty_clusters(points, out.centroids, out.assignments);
    Eigen::MatrixXd next = cluster_means(points, out.assignments, k);
    const double shift = (next - out.centroids).rowwise().norm().maxCoeff();
    out.centroids = std::move(next);
    ++out.iterations;
    if (shift < options.tolerance) {
      break;
    }
    assign_nearest(points, out.centroids, out.assignments);
  }
  out.wcss = within_cluster_ss(points, out.assignments, out.centroids);
  return out;
}

}  // namespace

ClusterResult kmeanspp_cluster(const Eigen::MatrixXd& points, std::size_t k, Rng& rng,
                               const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1 || k > n) {
    throw std::invalid_argument("kmeanspp_cluster: cluster count " + std::to_string(k) +
                                " must lie in 1.." + std::to_string(n));
  }
  if (options.restarts < 1) {
    throw std::invalid_argument("kmeanspp_cluster: restarts must be at least 1");
  }
  ClusterResult best = kmeanspp_once(points, k, rng, options);
  for (std::size_t r = 1; r < options.restarts; ++r) {
    ClusterResult next = kmeanspp_once(points, k, rng, options);
    if (next.wcss < best.wcss) best = std::move(next);
  }
  return best;
}

std::vector<std::size_t> diversity_select(const Eigen::MatrixXd& points,
                                          std::span<const std::size_t> assignments,
                                          const Eigen::MatrixXd& centroids, std::size_t target) {
  if (static_cast<std::size_t>(centroids.rows()) != target) {
    throw std::invalid_argument("diversity_select: cluster count must equal the target size");
  }
  if (assignments.size() != static_cast<std::size_t>(points.rows())) {
    throw std::invalid_argument("diversity_select: one assignment per point is required");
  }
  std::vector<std::size_t> pick(target, assignments.size());
  std::vector<double> best(target, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const std::size_t c = assignments[i];
    if (c >= target) {
      throw std::invalid_argument("diversity_select: assignment out of range");
    }
    const double d = squared_distance(points, static_cast<Eigen::Index>(i), centroids,
                                      static_cast<Eigen::Index>(c));
    if (d < best[c]) {
      best[c] = d;
      pick[c] = i;
    }
  }
  for (std::size_t c = 0; c < target; ++c) {
    if (pick[c] == assignments.size()) {
      throw std::invalid_argument("diversity_select: cluster " + std::to_string(c) +
                                  " has no members");
    }
  }
  std::sort(pick.begin(), pick.end());
  return pick;
}

}  // namespace varsearch
