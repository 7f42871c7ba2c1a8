#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "proteus/automl.hpp"
#include "proteus/dataset.hpp"
#include "proteus/metrics.hpp"

using namespace proteus;

namespace {

// Per-fold group counts by class for one repeat.
void check_folds(const FoldAssignment& folds, std::span<const int> labels, std::span<const int> groups,
                 std::size_t k) {
  for (const auto& f : folds) {
    std::map<int, int> fold_of_group;
    std::map<int, int> positive;
    for (std::size_t i = 0; i < f.size(); ++i) {
      ASSERT_GE(f[i], 0);
      ASSERT_LT(f[i], static_cast<int>(k));
      auto [it, inserted] = fold_of_group.emplace(groups[i], f[i]);
      EXPECT_EQ(it->second, f[i]) << "group " << groups[i] << " split across folds";
      positive[groups[i]] |= labels[i];
    }
    std::vector<int> pos(k, 0), neg(k, 0);
    for (auto [g, fold] : fold_of_group) (positive[g] ? pos : neg)[static_cast<std::size_t>(fold)]++;
    EXPECT_LE(*std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()), 1);
    EXPECT_LE(*std::max_element(neg.begin(), neg.end()) - *std::min_element(neg.begin(), neg.end()), 1);
  }
}

struct Toy {
  Matrix z;
  Labels y;
};

Toy toy(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Toy t;
  t.z.resize(120, 4);
  t.y.assign(120, 0);
  for (Eigen::Index i = 0; i < t.z.size(); ++i) t.z.data()[i] = g(rng);
  for (int i = 0; i < 12; ++i) {
    t.y[static_cast<std::size_t>(i * 10)] = 1;
    t.z(i * 10, 1) += 3.0;
  }
  return t;
}

std::vector<Configuration> small_grid() {
  SelectorConfig fbed;
  fbed.algorithm = SelectorAlgorithm::Fbed;
  SelectorConfig full;
  ClassifierConfig knn;
  knn.k = 3;
  ClassifierConfig rf;
  rf.algorithm = ClassifierAlgorithm::RandomForest;
  rf.n_trees = 20;
  return make_grid({fbed, full}, {knn, rf}, {0, 3});
}

}  // namespace

TEST(Folds, PropertiesOverRandomInstances) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    const std::size_t n_groups = k * 2 + rng() % 60;
    Labels labels;
    std::vector<int> groups;
    std::size_t positives = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
      const int pos = g < k || rng() % 5 == 0;
      positives += pos;
      const std::size_t size = 1 + rng() % 4;
      for (std::size_t m = 0; m < size; ++m) {
        labels.push_back(m == 0 ? pos : 0);
        groups.push_back(static_cast<int>(g));
      }
    }
    if (n_groups - positives < k) continue;
    CvProtocol p;
    p.k = k;
    p.r = 3;
    p.seed = rng();
    const auto folds = make_folds(labels, groups, p);
    ASSERT_EQ(folds.size(), 3u);
    check_folds(folds, labels, groups, k);
  }
}

TEST(Folds, TooFewGroups) {
  CvProtocol p;
  p.k = 5;
  const Labels y{1, 1, 0, 0, 0, 0, 0, 0};
  std::vector<int> g(8);
  std::iota(g.begin(), g.end(), 0);
  EXPECT_THROW(make_folds(y, g, p), Error);
}

TEST(Grid, DefaultSizeAndIds) {
  const auto grid = default_grid();
  EXPECT_EQ(grid.size(), 216u);
  std::set<std::string> ids;
  for (const auto& c : grid) ids.insert(c.id());
  EXPECT_EQ(ids.size(), 216u);
  EXPECT_EQ(grid.front().ps, 0u);
  EXPECT_EQ(grid.back().ps, 10u);
}

TEST(Grid, EvaluationInvariants) {
  const Toy t = toy(3);
  GridOptions o;
  o.protocol.k = 4;
  o.protocol.r = 3;
  o.protocol.seed = 5;
  const auto oracle = [](std::span<const double> r) { return r[1] > 2.0; };
  const auto configs = small_grid();
  const GridResult res = evaluate_grid(t.z, t.y, oracle, configs, o);
  ASSERT_EQ(res.predictions.size(), 3u);
  for (const auto& p : res.predictions) {
    EXPECT_EQ(p.rows(), t.z.rows());  // originals only, never pseudo rows
    EXPECT_EQ(p.cols(), static_cast<Eigen::Index>(configs.size()));
  }
  EXPECT_EQ(res.score_counts.minCoeff(), 3);
  EXPECT_EQ(res.score_counts.maxCoeff(), 3);
  for (const auto& set : res.oversampled) {
    const auto labels = set.data.all_labels();
    const auto groups = set.data.group_ids();
    check_folds(set.folds, labels, groups, 4);
    // Originals fall in the same folds whatever ps is.
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t i = 0; i < t.y.size(); ++i) EXPECT_EQ(set.folds[r][i], res.set_for(0).folds[r][i]);
    }
  }
  EXPECT_GT(res.mean_auc[select_winner(res)], 0.8);
}

TEST(Grid, UngroupedScattersPseudoRows) {
  const Toy t = toy(4);
  GridOptions o;
  o.protocol.k = 4;
  o.protocol.r = 1;
  o.protocol.grouping = false;
  const auto oracle = [](std::span<const double> r) { return r[1] > 2.0; };
  const GridResult res = evaluate_grid(t.z, t.y, oracle, small_grid(), o);
  const auto& set = res.set_for(3);
  std::size_t moved = 0;
  for (std::size_t p = 0; p < set.data.n_pseudo(); ++p) {
    moved += set.folds[0][set.data.n_original() + p] != set.folds[0][set.data.pseudo_parent[p]];
  }
  EXPECT_GT(moved, 0u);
}

TEST(Winner, TieBreaks) {
  GridResult r;
  SelectorConfig full;
  ClassifierConfig a;
  a.k = 3;
  ClassifierConfig b;
  b.k = 5;
  r.configs = make_grid({full}, {b, a}, {0});
  r.mean_auc = {0.9, 0.9};
  r.mean_subset_size = {4, 4};
  EXPECT_EQ(r.configs[select_winner(r)].classifier.k, 3u);  // "knn(k=3)" < "knn(k=5)"
  r.mean_subset_size = {3, 4};
  EXPECT_EQ(select_winner(r), 0u);
  r.mean_auc = {0.8, 0.9};
  EXPECT_EQ(select_winner(r), 1u);
}

TEST(Bbc, PureNoiseIsNearChance) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  Labels y(200);
  for (std::size_t i = 0; i < 200; ++i) y[i] = i % 2;
  std::vector<Eigen::MatrixXd> preds(1, Eigen::MatrixXd(200, 50));
  for (Eigen::Index i = 0; i < preds[0].size(); ++i) preds[0].data()[i] = u(rng);
  const auto res = bbc_correct(preds, y, {}, 300, 7, 2);
  EXPECT_NEAR(res.estimate, 0.5, 0.05);
  // Identical inputs give identical estimates regardless of threads.
  EXPECT_EQ(res.estimate, bbc_correct(preds, y, {}, 300, 7, 1).estimate);
}

TEST(Bbc, PerfectColumnIsOne) {
  Labels y(40);
  Eigen::MatrixXd p(40, 3);
  p.setRandom();
  for (Eigen::Index i = 0; i < 40; ++i) {
    y[static_cast<std::size_t>(i)] = i < 10;
    p(i, 1) = i < 10 ? 1.0 : 0.0;
  }
  const auto res = bbc_correct({p}, y, {}, 100, 1);
  EXPECT_DOUBLE_EQ(res.estimate, 1.0);
}

TEST(Explain, SmallRunIsDeterministic) {
  const Toy t = toy(5);
  ExplainOptions o;
  o.grid.protocol.k = 4;
  o.grid.protocol.r = 2;
  o.grid.protocol.seed = 9;
  o.bootstraps = 100;
  const auto oracle = [](std::span<const double> r) { return r[1] > 2.0; };
  const std::vector<std::string> names{"a", "b", "c", "d"};
  const auto a = explain(t.z, names, t.y, oracle, small_grid(), o);
  o.grid.jobs = 3;
  const auto b = explain(t.z, names, t.y, oracle, small_grid(), o);
  EXPECT_EQ(a.best.id(), b.best.id());
  EXPECT_EQ(a.bbc_auc, b.bbc_auc);
  EXPECT_EQ(a.selected, b.selected);
  ASSERT_TRUE(a.surrogate);
  for (Eigen::Index i = 0; i < t.z.rows(); ++i) EXPECT_EQ(a.surrogate->score(row_of(t.z, i)), b.surrogate->score(row_of(t.z, i)));
  EXPECT_EQ(a.table.size(), 8u);
}
