#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "../support/oracles.hpp"
#include "varsearch/features.hpp"
#include "varsearch/generator.hpp"

using namespace varsearch;

namespace {

ExtractorVariant variant(ExtractorTag tag, std::size_t grid, std::size_t sub = 2) {
  ExtractorVariant v;
  v.tag = tag;
  v.grid_rows = grid;
  v.grid_cols = grid;
  v.sub = sub;
  return v;
}

Image ramp(std::size_t n) {
  Image img(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) img.at(r, c) = static_cast<double>(r * n + c) / (n * n);
  }
  return img;
}

Rng rng_for(std::uint64_t seed) { return Rng(derive_stream(seed, StreamKind::kClustering, 0, 0)); }

}  // namespace

TEST(Extract, ConstantImageGivesZeroPcaEmbedding) {
  const std::vector<Image> imgs{Image(16, 16, 0.4)};
  const auto e = extract(imgs, variant(ExtractorTag::kPatchPca, 4));
  ASSERT_EQ(e.vectors.cols(), 16);
  EXPECT_LE(e.vectors.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Extract, IdenticalImagesGiveIdenticalRows) {
  const Image img = procedural_target(TargetPattern::kBlobs, 3, 32, 32);
  const std::vector<Image> imgs{img, img};
  for (auto tag : {ExtractorTag::kPatchPca, ExtractorTag::kPooled, ExtractorTag::kRawDownsample}) {
    const auto e = extract(imgs, variant(tag, 4));
    EXPECT_EQ(e.vectors.row(0), e.vectors.row(1)) << to_string(tag);
    EXPECT_EQ(e.count(), 2u);
  }
}

TEST(Extract, RawDownsampleHandComputed) {
  Image img(4, 4);
  const double px[16] = {0.0, 0.2, 0.4, 0.6,  //
                         0.2, 0.2, 0.8, 1.0,  //
                         1.0, 0.0, 0.1, 0.1,  //
                         0.6, 0.2, 0.3, 0.3};
  std::copy(px, px + 16, img.values().begin());
  const std::vector<Image> imgs{img};
  const auto e = extract(imgs, variant(ExtractorTag::kRawDownsample, 2));
  ASSERT_EQ(e.vectors.cols(), 4);
  EXPECT_DOUBLE_EQ(e.vectors(0, 0), (0.0 + 0.2 + 0.2 + 0.2) / 4);
  EXPECT_DOUBLE_EQ(e.vectors(0, 1), (0.4 + 0.6 + 0.8 + 1.0) / 4);
  EXPECT_DOUBLE_EQ(e.vectors(0, 2), (1.0 + 0.0 + 0.6 + 0.2) / 4);
  EXPECT_DOUBLE_EQ(e.vectors(0, 3), (0.1 + 0.1 + 0.3 + 0.3) / 4);
}

TEST(Extract, PooledIsMeanOfPatchFeatures) {
  const Image img = ramp(8);
  const std::vector<Image> imgs{img};
  const auto v = variant(ExtractorTag::kPooled, 2, 2);
  const auto e = extract(imgs, v);
  ASSERT_EQ(e.vectors.cols(), 4);
  const auto pf = patch_features(img, v);
  ASSERT_EQ(pf.rows(), 4);
  // Patch (0,0) sub-cell (0,0) covers pixels rows 0-1, cols 0-1.
  EXPECT_DOUBLE_EQ(pf(0, 0), (0 + 1 + 8 + 9) / 4.0 / 64.0);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(e.vectors(0, j), pf.col(j).mean(), 1e-15);
}

TEST(Extract, GridMismatchThrows) {
  const std::vector<Image> imgs{Image(10, 10, 0.1)};
  EXPECT_THROW(extract(imgs, variant(ExtractorTag::kRawDownsample, 3)), std::invalid_argument);
  EXPECT_THROW(extract(imgs, variant(ExtractorTag::kPooled, 5, 3)), std::invalid_argument);
  const std::vector<Image> mixed{Image(8, 8), Image(4, 4)};
  EXPECT_THROW(extract(mixed, variant(ExtractorTag::kRawDownsample, 2)), std::invalid_argument);
}

TEST(Extract, RowsPermuteWithInputs) {
  std::vector<Image> imgs;
  for (std::uint64_t s = 0; s < 5; ++s) imgs.push_back(procedural_target(TargetPattern::kAuto, s, 32, 32));
  std::vector<Image> rev(imgs.rbegin(), imgs.rend());
  for (auto tag : {ExtractorTag::kPatchPca, ExtractorTag::kPooled, ExtractorTag::kRawDownsample}) {
    const auto a = extract(imgs, variant(tag, 4));
    const auto b = extract(rev, variant(tag, 4));
    for (int i = 0; i < 5; ++i) EXPECT_EQ(a.vectors.row(i), b.vectors.row(4 - i));
  }
}

TEST(Pca, ExactSubspaceReconstructs) {
  Rng rng = rng_for(1);
  Eigen::MatrixXd basis(2, 5);
  for (int i = 0; i < 2; ++i) for (int j = 0; j < 5; ++j) basis(i, j) = rng.normal();
  Eigen::MatrixXd coef(40, 2);
  for (int i = 0; i < 40; ++i) for (int j = 0; j < 2; ++j) coef(i, j) = rng.normal();
  Eigen::RowVectorXd offset(5);
  for (int j = 0; j < 5; ++j) offset(j) = rng.normal();
  Eigen::MatrixXd data = coef * basis;
  data.rowwise() += offset;
  const auto proj = pca_project(data, 2);
  const auto comps = pca_components(data, 2);
  Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  const Eigen::MatrixXd recon = proj * comps.transpose();
  EXPECT_LE((recon - centered).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Pca, IsotropicHalfVariance) {
  Rng rng = rng_for(2);
  Eigen::MatrixXd data(10000, 2);
  for (int i = 0; i < 10000; ++i) {
    data(i, 0) = rng.normal();
    data(i, 1) = rng.normal();
  }
  const auto proj = pca_project(data, 1);
  const double var = proj.squaredNorm() / 9999.0;
  Eigen::MatrixXd c = data.rowwise() - data.colwise().mean();
  const double total = c.squaredNorm() / 9999.0;
  EXPECT_NEAR(var, total / 2, 0.1 * total / 2);
}

TEST(Pca, SignConventionAndPermutationInvariance) {
  Rng rng = rng_for(3);
  Eigen::MatrixXd data(30, 4);
  for (int i = 0; i < 30; ++i) for (int j = 0; j < 4; ++j) data(i, j) = rng.normal() * (j + 1);
  const auto comps = pca_components(data, 3);
  for (int c = 0; c < 3; ++c) {
    Eigen::Index arg;
    comps.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(comps(arg, c), 0.0);
  }
  Eigen::MatrixXd shuffled = data.colwise().reverse();
  const auto comps2 = pca_components(shuffled, 3);
  EXPECT_LE((comps - comps2).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Pca, Preconditions) {
  EXPECT_THROW(pca_project(Eigen::MatrixXd::Ones(1, 3), 1), std::invalid_argument);
  EXPECT_THROW(pca_project(Eigen::MatrixXd::Ones(4, 3), 4), std::invalid_argument);
  EXPECT_THROW(pca_project(Eigen::MatrixXd::Ones(4, 3), 0), std::invalid_argument);
}

TEST(KMeans, KEqualsNIsIdentity) {
  Rng rng = rng_for(4);
  Eigen::MatrixXd pts(6, 2);
  for (int i = 0; i < 6; ++i) pts.row(i) << i * 1.5, (i % 2) * 3.0;
  const auto res = kmeanspp_cluster(pts, 6, rng);
  std::set<std::size_t> labels(res.assignments.begin(), res.assignments.end());
  EXPECT_EQ(labels.size(), 6u);
  EXPECT_NEAR(res.wcss, 0.0, 1e-12);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(res.centroids.row(static_cast<Eigen::Index>(res.assignments[i])), pts.row(i));
  }
}

TEST(KMeans, SeparatedBlobsRecovered) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng data_rng(derive_stream(seed, StreamKind::kGeneration, 0, 0));
    Eigen::MatrixXd pts(40, 2);
    for (int i = 0; i < 40; ++i) {
      const double cx = i < 20 ? 0.0 : 10.0;
      pts.row(i) << cx + data_rng.normal(), data_rng.normal();
    }
    Rng rng = rng_for(seed);
    const auto res = kmeanspp_cluster(pts, 2, rng);
    for (int i = 1; i < 40; ++i) {
      EXPECT_EQ(res.assignments[i] == res.assignments[0], i < 20) << "seed " << seed;
    }
  }
}

TEST(KMeans, SecondSeedFollowsSquaredDistance) {
  Eigen::MatrixXd pts(2, 1);
  pts << 0.0, 3.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng = rng_for(seed);
    const auto res = kmeanspp_cluster(pts, 2, rng);
    ASSERT_EQ(res.seeds.size(), 2u);
    EXPECT_NE(res.seeds[0], res.seeds[1]);
  }
}

TEST(KMeans, AllEqualPointsStillGiveNonemptyClusters) {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Ones(5, 2);
  Rng rng = rng_for(6);
  const auto res = kmeanspp_cluster(pts, 3, rng);
  std::vector<int> counts(3, 0);
  for (auto a : res.assignments) ++counts[a];
  for (int c : counts) EXPECT_GT(c, 0);
}

TEST(KMeans, LloydNeverIncreasesObjective) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng data_rng(derive_stream(seed, StreamKind::kGeneration, 1, 0));
    Eigen::MatrixXd pts(25, 3);
    for (int i = 0; i < 25; ++i) for (int j = 0; j < 3; ++j) pts(i, j) = data_rng.normal();
    Rng rng = rng_for(seed);
    const auto res = kmeanspp_cluster(pts, 4, rng);
    EXPECT_LE(res.wcss, res.seeding_wcss + 1e-12);
    EXPECT_NEAR(res.wcss, within_cluster_ss(pts, res.assignments, res.centroids), 1e-9);
  }
}

TEST(KMeans, NearOptimalOnSmallInstances) {
  int good = 0;
  const int trials = 200;
  for (int seed = 0; seed < trials; ++seed) {
    Rng data_rng(derive_stream(static_cast<std::uint64_t>(seed), StreamKind::kGeneration, 2, 0));
    const int n = 3 + static_cast<int>(data_rng.uniform_index(6));
    const int m = 1 + static_cast<int>(data_rng.uniform_index(2));
    const int k = 2 + static_cast<int>(data_rng.uniform_index(std::min(n - 1, 3)));
    Eigen::MatrixXd pts(n, m);
    for (int i = 0; i < n; ++i) for (int j = 0; j < m; ++j) pts(i, j) = data_rng.uniform();
    Rng rng = rng_for(static_cast<std::uint64_t>(seed));
    const auto res = kmeanspp_cluster(pts, static_cast<std::size_t>(k), rng);
    const double opt = oracle::optimal_wcss(pts, k);
    if (res.wcss <= 1.05 * opt + 1e-12) ++good;
  }
  EXPECT_GE(good, static_cast<int>(0.95 * trials));
}

TEST(KMeans, RestartsKeepTheBestRun) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng data_rng(derive_stream(seed, StreamKind::kGeneration, 3, 0));
    Eigen::MatrixXd pts(12, 2);
    for (int i = 0; i < pts.size(); ++i) pts.data()[i] = data_rng.uniform();
    KMeansOptions once;
    once.restarts = 1;
    Rng a = rng_for(seed);
    Rng b = rng_for(seed);
    const auto single = kmeanspp_cluster(pts, 3, a, once);
    const auto multi = kmeanspp_cluster(pts, 3, b);
    EXPECT_LE(multi.wcss, single.wcss);
  }
  KMeansOptions none;
  none.restarts = 0;
  Rng rng = rng_for(1);
  EXPECT_THROW(kmeanspp_cluster(Eigen::MatrixXd::Zero(3, 2), 2, rng, none), std::invalid_argument);
}

TEST(KMeans, TooManyClustersThrows) {
  Rng rng = rng_for(7);
  EXPECT_THROW(kmeanspp_cluster(Eigen::MatrixXd::Zero(3, 2), 4, rng), std::invalid_argument);
  EXPECT_THROW(kmeanspp_cluster(Eigen::MatrixXd::Zero(3, 2), 0, rng), std::invalid_argument);
}

TEST(DiversitySelect, IdenticalPointsPickIndexZero) {
  const Eigen::MatrixXd pts = Eigen::MatrixXd::Constant(4, 2, 0.5);
  const Eigen::MatrixXd cent = Eigen::MatrixXd::Constant(1, 2, 0.5);
  const std::vector<std::size_t> asg(4, 0);
  EXPECT_EQ(diversity_select(pts, asg, cent, 1), (std::vector<std::size_t>{0}));
}

TEST(DiversitySelect, HandComputedDistances) {
  // Cluster A centred at 0: members at 0.1 and 0.5. Cluster B centred at 10:
  // members at 0.3 and 0.2.
  Eigen::MatrixXd pts(4, 1);
  pts << 0.5, 10.3, 0.1, 10.2;
  Eigen::MatrixXd cent(2, 1);
  cent << 0.0, 10.0;
  const std::vector<std::size_t> asg{0, 1, 0, 1};
  EXPECT_EQ(diversity_select(pts, asg, cent, 2), (std::vector<std::size_t>{2, 3}));
}

TEST(DiversitySelect, TargetEqualsNReturnsAll) {
  Eigen::MatrixXd pts(3, 1);
  pts << 1.0, 2.0, 3.0;
  const std::vector<std::size_t> asg{2, 0, 1};
  Eigen::MatrixXd cent(3, 1);
  cent << 2.0, 3.0, 1.0;
  EXPECT_EQ(diversity_select(pts, asg, cent, 3), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(DiversitySelect, DistinctOnePerCluster) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng data_rng(derive_stream(seed, StreamKind::kGeneration, 3, 0));
    const std::size_t n = 2 + data_rng.uniform_index(15);
    const std::size_t k = 1 + data_rng.uniform_index(n);
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << data_rng.normal(), data_rng.normal();
    Rng rng = rng_for(seed);
    const auto res = kmeanspp_cluster(pts, k, rng);
    const auto sel = diversity_select(pts, res.assignments, res.centroids, k);
    ASSERT_EQ(sel.size(), k);
    std::set<std::size_t> clusters;
    for (auto i : sel) clusters.insert(res.assignments[i]);
    EXPECT_EQ(clusters.size(), k);
    EXPECT_EQ(std::set<std::size_t>(sel.begin(), sel.end()).size(), k);
  }
}

TEST(DiversitySelect, RejectsWrongClusterCount) {
  Eigen::MatrixXd pts(2, 1);
  pts << 0.0, 1.0;
  Eigen::MatrixXd cent(1, 1);
  cent << 0.5;
  EXPECT_THROW(diversity_select(pts, std::vector<std::size_t>{0, 0}, cent, 2),
               std::invalid_argument);
}
