#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "varsearch/rng.hpp"
#include "varsearch/tensor.hpp"
#include "varsearch/types.hpp"

namespace varsearch {

/// One embedding row per candidate.
struct EmbeddingSet {
  Eigen::MatrixXd vectors;
  std::size_t source_scale = 0;

  std::size_t count() const { return static_cast<std::size_t>(vectors.rows()); }
};

/// Embeds a batch of equally sized images.
///
///  - kPatchPca: per image, the (grid_rows*grid_cols) x sub^2 patch-feature
///    matrix is reduced by PCA across its own patches to one scalar per patch.
///  - kPooled: mean of the patch features, length sub^2.
///  - kRawDownsample: the image box-averaged to the patch grid.
///
/// Throws std::invalid_argument if the grid does not divide the image or the
/// sub-cells do not divide a patch.
EmbeddingSet extract(std::span<const Image> images, const ExtractorVariant& variant,
                     std::size_t source_scale = 0);

/// Patch feature matrix of one image (rows = patches in row-major grid
/// order, columns = sub-cells in row-major order).
Eigen::MatrixXd patch_features(const Image& image, const ExtractorVariant& variant);

/// Centered projection onto the top-q covariance eigenvectors.
///
/// Each component is oriented so that its entry of largest magnitude is
/// positive (ties: lowest index). Requires n >= 2 and q <= min(n, m).
Eigen::MatrixXd pca_project(const Eigen::MatrixXd& data, std::size_t components);

/// Principal axes (columns) in the same orientation pca_project uses.
Eigen::MatrixXd pca_components(const Eigen::MatrixXd& data, std::size_t components);

struct ClusterResult {
  std::vector<std::size_t> assignments;
  Eigen::MatrixXd centroids;
  std::vector<std::size_t> seeds;  // point index chosen for each initial center
  double seeding_wcss = 0.0;
  double wcss = 0.0;
  std::size_t iterations = 0;
};

struct KMeansOptions {
  double tolerance = 1e-8;  // max centroid shift
  std::size_t max_iterations = 100;
  std::size_t restarts = 10;  // independent seedings drawn in sequence from rng; lowest WCSS wins
};

/// K-Means++ seeding followed by Lloyd iterations, repeated `restarts`
/// times; the run with the lowest final WCSS is returned (earliest on ties).
///
/// The first center is uniform; each further center is drawn with
/// probability proportional to the squared distance to the nearest chosen
/// center (lowest unchosen index when every distance is zero). A cluster
/// that empties is re-seeded at the point farthest from its own centroid
/// among clusters with at least two members, so every cluster is nonempty on
/// return.
ClusterResult kmeanspp_cluster(const Eigen::MatrixXd& points, std::size_t k, Rng& rng,
                               const KMeansOptions& options = {});

double within_cluster_ss(const Eigen::MatrixXd& points, std::span<const std::size_t> assignments,
                         const Eigen::MatrixXd& centroids);

/// One member per cluster: the one nearest its centroid (ties: lowest
/// index). Returned in ascending candidate order.
std::vector<std::size_t> diversity_select(const Eigen::MatrixXd& points,
                                          std::span<const std::size_t> assignments,
                                          const Eigen::MatrixXd& centroids, std::size_t target);

}  // namespace varsearch
