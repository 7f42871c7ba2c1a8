#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "proteus/dataset.hpp"
#include "proteus/detectors.hpp"
#include "proteus/metrics.hpp"

using namespace proteus;

namespace {

// LOF straight from the definitions, O(n^2 k).
std::vector<double> brute_lof(const Matrix& x, std::size_t k) {
  const auto n = static_cast<std::size_t>(x.rows());
  auto dist = [&](std::size_t a, std::size_t b) { return (x.row(a) - x.row(b)).norm(); };
  std::vector<std::vector<std::size_t>> nb(n);
  std::vector<double> kd(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j) if (j != i) others.push_back(j);
    std::stable_sort(others.begin(), others.end(), [&](auto a, auto b) { return dist(i, a) < dist(i, b); });
    nb[i].assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k));
    kd[i] = dist(i, nb[i].back());
  }
  std::vector<double> lrd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (auto o : nb[i]) s += std::max(kd[o], dist(i, o));
    lrd[i] = 1.0 / std::max(s / static_cast<double>(k), LocalOutlierFactor::kDistanceFloor);
  }
  std::vector<double> lof(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (auto o : nb[i]) s += lrd[o];
    lof[i] = s / static_cast<double>(k) / lrd[i];
  }
  return lof;
}

}  // namespace

TEST(IsolationForest, AveragePathLength) {
  EXPECT_EQ(average_path_length(1), 0.0);
  EXPECT_EQ(average_path_length(2), 1.0);
  const double h255 = std::log(255.0) + 0.5772156649015329;
  EXPECT_NEAR(average_path_length(256), 2.0 * h255 - 2.0 * 255.0 / 256.0, 1e-9);
}

TEST(IsolationForest, IsolatesFarPoint) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Matrix x(300, 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = g(rng), x(i, 1) = g(rng);
  x(0, 0) = 8.0;
  x(0, 1) = 8.0;
  IsolationForestParams p;
  p.seed = 3;
  const auto f = IsolationForest::fit(x, p);
  const double far = f.score(row_of(x, 0));
  for (Eigen::Index i = 1; i < x.rows(); ++i) EXPECT_LT(f.score(row_of(x, i)), far);
  EXPECT_GT(far, 0.6);
  EXPECT_EQ(f.subsample_size(), 256u);
}

TEST(IsolationForest, SmallSampleClampsSubsample) {
  Matrix x = Matrix::Random(50, 3);
  const auto f = IsolationForest::fit(x, {});
  EXPECT_EQ(f.subsample_size(), 50u);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double s = f.score(row_of(x, i));
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
}

TEST(Lof, FourPoints) {
  Matrix x(4, 1);
  x << 0.0, 1.0, 2.0, 10.0;
  const auto lof = LocalOutlierFactor::fit(x, {2});
  const auto want = brute_lof(x, 2);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(lof.training_scores()[i], want[i], 1e-12);
  EXPECT_GT(lof.training_scores()[3], 3.0);
}

TEST(Lof, MatchesBruteForce) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x(40, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    const std::size_t k = 1 + static_cast<std::size_t>(trial % 8);
    const auto lof = LocalOutlierFactor::fit(x, {k});
    const auto want = brute_lof(x, k);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(lof.training_scores()[i], want[i], 1e-10);
  }
}

TEST(Lof, RejectsBadK) {
  Matrix x = Matrix::Random(5, 2);
  EXPECT_THROW(LocalOutlierFactor::fit(x, {5}), Error);
  EXPECT_THROW(LocalOutlierFactor::fit(x, {0}), Error);
}

TEST(Loda, OutlierScoresHigher) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Matrix x(500, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  LodaParams p;
  p.seed = 11;
  const auto m = Loda::fit(x, p);
  std::vector<double> far{6, -6, 6, -6};
  std::vector<double> center{0, 0, 0, 0};
  EXPECT_GT(m.score(far), m.score(center));
  EXPECT_EQ(m.projection_count(), 100u);
  const auto contrib = m.feature_contributions(far);
  EXPECT_EQ(contrib.size(), 4u);
}

TEST(Binarize, QuantileThreshold) {
  std::vector<double> s(100);
  std::iota(s.begin(), s.end(), 0.0);
  const auto b = binarize(s, 0.05);
  EXPECT_NEAR(b.threshold, 94.05, 1e-9);
  EXPECT_EQ(count_positive(b.labels), 5u);
  EXPECT_THROW(binarize(s, 0.0), Error);
  EXPECT_THROW(binarize(std::vector<double>(10, 1.0), 0.1), Error);
}

TEST(DetectorModel, InputColumnsIgnoreTheRest) {
  const HicsParent p = make_hics_like_parent(5);
  const Matrix z = StandardScaler::fit(p.dataset.values).transform(p.dataset.values);
  DetectorParams params;
  params.kind = DetectorKind::Lof;
  const auto base = DetectorModel::fit(z, params);
  Matrix wide(z.rows(), 7);
  wide.leftCols(5) = z;
  wide.rightCols(2).setRandom();
  const auto restricted = DetectorModel::fit(wide, params, {0, 1, 2, 3, 4});
  for (Eigen::Index i = 0; i < 20; ++i) EXPECT_DOUBLE_EQ(base.score(row_of(z, i)), restricted.score(row_of(wide, i)));
  EXPECT_THROW(restricted.score(row_of(z, 0)), Error);
  EXPECT_EQ(parse_detector_kind("IF"), DetectorKind::IsolationForest);
  EXPECT_THROW(parse_detector_kind("svm"), Error);
}
