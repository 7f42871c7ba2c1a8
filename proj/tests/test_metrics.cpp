#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "proteus/metrics.hpp"

using namespace proteus;

namespace {

double brute_auc(const std::vector<double>& s, const Labels& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

}  // namespace

TEST(Auc, MatchesPairCountingWithTies) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 120;
    std::vector<double> s(n);
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 7);
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_EQ(auc(s, y), brute_auc(s, y));
  }
}

TEST(Auc, Extremes) {
  EXPECT_EQ(auc(std::vector<double>{1, 2, 3, 4}, Labels{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(auc(std::vector<double>{4, 3, 2, 1}, Labels{0, 0, 1, 1}), 0.0);
  EXPECT_EQ(auc(std::vector<double>{1, 1, 1, 1}, Labels{0, 1, 0, 1}), 0.5);
  EXPECT_THROW(auc(std::vector<double>{1, 2}, Labels{1, 1}), Error);
}

TEST(WeightedAuc, EqualsAucOfExpandedSample) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20;
    std::vector<double> s(n);
    Labels y(n);
    std::vector<int> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 5);
      y[i] = i % 3 == 0;
      w[i] = static_cast<int>(rng() % 3);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return s[a] < s[b]; });
    std::vector<double> es;
    Labels ey;
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < w[i]; ++k) {
        es.push_back(s[i]);
        ey.push_back(y[i]);
      }
    }
    const auto got = weighted_auc(s, y, order, w);
    const std::size_t pos = count_positive(ey);
    if (pos == 0 || pos == ey.size()) {
      EXPECT_FALSE(got);
    } else {
      ASSERT_TRUE(got);
      EXPECT_NEAR(*got, brute_auc(es, ey), 1e-12);
    }
  }
}

TEST(FeaturePr, Basics) {
  const std::vector<std::size_t> gold{0, 1, 2, 3, 4};
  auto pr = feature_pr(gold, std::vector<std::size_t>{0, 1, 9});
  EXPECT_DOUBLE_EQ(pr.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(pr.recall, 0.4);
  pr = feature_pr(gold, std::vector<std::size_t>{});
  EXPECT_TRUE(pr.precision_undefined);
  EXPECT_EQ(pr.recall, 0.0);
}

TEST(Conflicts, HandComputed) {
  const Labels det{1, 1, 0, 0, 1, 0, 0};
  const Labels sur{0, 1, 1, 0, 0, 1, 0};
  const Labels gold{0, 1, 1, 0, 1, 0, 0};
  const auto c = conflicts(det, sur);
  EXPECT_EQ(c.anc, (std::vector<std::size_t>{0, 4}));
  EXPECT_EQ(c.nac, (std::vector<std::size_t>{2, 5}));
  const auto r = discovery_rates(c, gold);
  // ANC rows {0,4}: gold normal at 0 -> TND = 1/2. NAC rows {2,5}: gold anomaly at 2 -> TAD = 1/2.
  ASSERT_TRUE(r.tnd && r.tad);
  EXPECT_EQ(*r.tnd, 0.5);
  EXPECT_EQ(*r.tad, 0.5);
}

TEST(Conflicts, EmptySetsAreUndefined) {
  const Labels same{1, 0, 1};
  const auto c = conflicts(same, same);
  const auto r = discovery_rates(c, Labels{1, 0, 0});
  EXPECT_FALSE(r.tnd);
  EXPECT_FALSE(r.tad);
  EXPECT_THROW(conflicts(Labels{1, 0}, Labels{1}), Error);
}

TEST(Bias, SummaryPerVariant) {
  std::vector<BiasRecord> recs;
  for (auto v : kBiasVariants) {
    recs.push_back({0.9, 0.8, v});
    recs.push_back({0.7, 0.8, v});
  }
  recs.push_back({1.0, 0.5, BiasVariant::CvNoGroup});
  const auto s = bias_summary(recs);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_NEAR(s[0].rss, 0.02, 1e-12);
  EXPECT_NEAR(s[0].mean_bias, 0.0, 1e-12);
  EXPECT_EQ(s[3].count, 3u);
  EXPECT_NEAR(s[3].rss, 0.27, 1e-12);
  EXPECT_THROW(bias_summary(std::vector<BiasRecord>{{0.9, 0.8, BiasVariant::BbcGroup}}), Error);
}
