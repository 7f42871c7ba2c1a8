#include <gtest/gtest.h>

#include <cmath>

#include "proteus/dataset.hpp"
#include "proteus/oversampler.hpp"

using namespace proteus;

TEST(Oversample, HalfSpaceAcceptanceRate) {
  // One anomaly at 0.05 with sigma 0.1 against the oracle x0 > 0: acceptance Phi(0.5).
  Matrix x(2, 1);
  x << 0.05, -3.0;
  const Labels y{1, 0};
  OversampleParams p;
  p.ps = 20000;
  p.sigma = 0.1;
  p.seed = 17;
  const auto aug = oversample(x, y, [](std::span<const double> r) { return r[0] > 0.0; }, p);
  const double phi = 0.5 * std::erfc(-0.5 / std::sqrt(2.0));
  EXPECT_NEAR(aug.fill.acceptance_rate(), phi, 0.01);
  EXPECT_EQ(aug.fill.accepted, 20000u);
  EXPECT_EQ(aug.fill.underfilled_anomalies, 0u);
}

TEST(Oversample, PseudoRowsPassTheDetector) {
  const HicsParent parent = make_hics_like_parent(2);
  const Matrix z = StandardScaler::fit(parent.dataset.values).transform(parent.dataset.values);
  DetectorParams dp;
  dp.iforest.seed = 4;
  auto det = DetectorModel::fit(z, dp);
  const auto bin = binarize(det.training_scores(), 0.0115);
  det.set_threshold(bin.threshold);
  OversampleParams p;
  p.ps = 10;
  p.seed = 8;
  const auto aug = oversample(z, bin.labels, det, p);
  ASSERT_GT(aug.n_pseudo(), 0u);
  for (std::size_t i = 0; i < aug.n_pseudo(); ++i) {
    EXPECT_GT(det.score(row_of(aug.pseudo_rows, static_cast<Eigen::Index>(i))), det.threshold());
    EXPECT_EQ(bin.labels[aug.pseudo_parent[i]], 1);
  }
  const auto groups = aug.group_ids();
  const auto labels = aug.all_labels();
  ASSERT_EQ(groups.size(), aug.size());
  for (std::size_t i = 0; i < aug.n_pseudo(); ++i) {
    EXPECT_EQ(groups[aug.n_original() + i], static_cast<int>(aug.pseudo_parent[i]));
    EXPECT_EQ(labels[aug.n_original() + i], 1);
  }
  EXPECT_EQ(aug.fill.requested, count_positive(bin.labels) * 10);
}

TEST(Oversample, PerAnomalyStreamsAreIndependentOfOtherRows) {
  Matrix x(4, 2);
  x << 1, 1, 0, 0, 2, 2, 0, 1;
  const Labels y{1, 0, 1, 0};
  OversampleParams p;
  p.ps = 5;
  p.seed = 3;
  auto always = [](std::span<const double>) { return true; };
  const auto full = oversample(x, y, always, p);
  // Drop the second anomaly: the first one's pseudo rows must not change.
  const auto part = oversample(x, Labels{1, 0, 0, 0}, always, p);
  ASSERT_EQ(part.n_pseudo(), 5u);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_EQ(part.pseudo_rows.row(i), full.pseudo_rows.row(i));
}

TEST(Oversample, UnderfilledAndErrors) {
  Matrix x(2, 1);
  x << 0.0, 1.0;
  OversampleParams p;
  p.ps = 3;
  p.max_attempts_per_pseudo = 4;
  const auto aug = oversample(x, Labels{1, 0}, [](std::span<const double>) { return false; }, p);
  EXPECT_EQ(aug.n_pseudo(), 0u);
  EXPECT_EQ(aug.fill.draws, 12u);
  EXPECT_EQ(aug.fill.underfilled_anomalies, 1u);
  EXPECT_THROW(oversample(x, Labels{0, 0}, [](std::span<const double>) { return true; }, p), Error);
  p.sigma = 0.0;
  EXPECT_THROW(oversample(x, Labels{1, 0}, [](std::span<const double>) { return true; }, p), Error);
}
