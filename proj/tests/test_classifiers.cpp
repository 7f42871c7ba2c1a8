#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "proteus/classifiers.hpp"
#include "proteus/metrics.hpp"
#include "proteus/model_io.hpp"

using namespace proteus;

namespace {

struct Blobs {
  Matrix x;
  Labels y;
};

Blobs blobs(std::size_t n, std::size_t d, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Blobs b;
  b.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  b.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.y[i] = i % 4 == 0;
    for (std::size_t j = 0; j < d; ++j) {
      b.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g(rng) + (b.y[i] && j == 0 ? shift : 0.0);
    }
  }
  return b;
}

std::vector<double> scores_of(const Classifier& c, const Matrix& x) {
  std::vector<double> s;
  for (Eigen::Index i = 0; i < x.rows(); ++i) s.push_back(c.score(row_of(x, i)));
  return s;
}

}  // namespace

TEST(Knn, FractionOfNeighbors) {
  Matrix x(5, 1);
  x << 0, 1, 2, 10, 11;
  const auto m = KnnClassifier::fit(x, Labels{0, 0, 0, 1, 1}, 3);
  EXPECT_DOUBLE_EQ(m.score(std::vector<double>{10.5}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.score(std::vector<double>{0.5}), 0.0);
}

TEST(Classifiers, SeparateShiftedBlobs) {
  const auto train = blobs(400, 3, 3.0, 1);
  const auto test = blobs(400, 3, 3.0, 2);
  for (auto algo : {ClassifierAlgorithm::Knn, ClassifierAlgorithm::RandomForest, ClassifierAlgorithm::LinearSvm}) {
    ClassifierConfig c;
    c.algorithm = algo;
    const auto m = Classifier::fit(c, train.x, train.y, 5);
    EXPECT_GT(auc(scores_of(m, test.x), test.y), 0.93) << c.id();
  }
}

TEST(RandomForest, DeterministicGivenSeed) {
  const auto b = blobs(200, 4, 1.5, 3);
  const auto a = RandomForest::fit(b.x, b.y, 30, 1, 9);
  const auto c = RandomForest::fit(b.x, b.y, 30, 1, 9);
  for (Eigen::Index i = 0; i < 50; ++i) EXPECT_EQ(a.score(row_of(b.x, i)), c.score(row_of(b.x, i)));
}

TEST(RandomForest, GroupBaggingKeepsGroupsTogether) {
  const auto b = blobs(120, 2, 2.0, 4);
  std::vector<int> groups(120);
  for (std::size_t i = 0; i < 120; ++i) groups[i] = static_cast<int>(i / 3);
  const auto f = RandomForest::fit(b.x, b.y, 50, 1, 2, &groups);
  // Members of a group share their out-of-bag trees, hence their OOB vote count is defined together.
  for (std::size_t g = 0; g < 40; ++g) {
    const bool d0 = !std::isnan(f.oob_scores()[3 * g]);
    EXPECT_EQ(d0, !std::isnan(f.oob_scores()[3 * g + 1]));
    EXPECT_EQ(d0, !std::isnan(f.oob_scores()[3 * g + 2]));
  }
}

TEST(LinearSvm, ObjectiveNeverIncreases) {
  const auto b = blobs(300, 5, 1.0, 5);
  for (double c : {0.1, 1.0, 10.0}) {
    const auto m = LinearSvm::fit(b.x, b.y, c, 100, 1);
    const auto& h = m.objective_history();
    ASSERT_EQ(h.size(), 100u);
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]);
    EXPECT_GT(m.weights()(0), 0.0);
  }
}

TEST(Classifiers, ConfigValidation) {
  ClassifierConfig c;
  c.k = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.algorithm = ClassifierAlgorithm::LinearSvm;
  c.c = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.algorithm = ClassifierAlgorithm::RandomForest;
  EXPECT_EQ(c.id(), "rf(trees=100,min_leaf=1)");
}

TEST(Surrogate, OuterScalerFoldsIn) {
  const auto b = blobs(200, 4, 2.0, 6);
  Matrix raw = b.x * 3.0;
  raw.col(2).array() += 10.0;
  const auto outer = StandardScaler::fit(raw);
  const Matrix z = outer.transform(raw);
  const std::vector<std::size_t> feats{0, 2};
  const Matrix zs = take_cols(z, feats);
  const auto inner = StandardScaler::fit(zs);
  ClassifierConfig cc;
  cc.algorithm = ClassifierAlgorithm::LinearSvm;
  const auto clf = Classifier::fit(cc, inner.transform(zs), b.y, 1);
  const SurrogateModel model({"a", "b", "c", "d"}, feats, inner, clf);
  const auto raw_model = model.with_input_scaler(outer);
  for (Eigen::Index i = 0; i < 30; ++i) {
    EXPECT_NEAR(model.score(row_of(z, i)), raw_model.score(row_of(raw, i)), 1e-12);
  }
  EXPECT_EQ(model.feature_names(), (std::vector<std::string>{"a", "c"}));
}

TEST(ModelIo, RoundTripEveryKind) {
  const auto b = blobs(150, 3, 2.0, 7);
  for (auto algo : {ClassifierAlgorithm::Knn, ClassifierAlgorithm::RandomForest, ClassifierAlgorithm::LinearSvm}) {
    ClassifierConfig cc;
    cc.algorithm = algo;
    cc.n_trees = 20;
    const std::vector<std::size_t> feats{2, 0};
    const Matrix xs = take_cols(b.x, feats);
    const auto scaler = StandardScaler::fit(xs);
    const SurrogateModel m({"x0", "x1", "x2"}, feats, scaler, Classifier::fit(cc, scaler.transform(xs), b.y, 3));
    std::stringstream buf;
    write_model(buf, m);
    const auto back = read_model(buf);
    EXPECT_EQ(back.input_names(), m.input_names());
    EXPECT_EQ(back.features(), m.features());
    for (Eigen::Index i = 0; i < b.x.rows(); ++i) EXPECT_EQ(back.score(row_of(b.x, i)), m.score(row_of(b.x, i)));
    std::stringstream again;
    write_model(again, back);
    EXPECT_EQ(again.str(), buf.str());
  }
}

TEST(ModelIo, RejectsDamagedFiles) {
  std::stringstream bad("NOT-A-MODEL\n");
  EXPECT_THROW(read_model(bad), Error);
  const auto b = blobs(60, 2, 2.0, 8);
  ClassifierConfig cc;
  const auto scaler = StandardScaler::fit(b.x);
  const SurrogateModel m({"p", "q"}, {0, 1}, scaler, Classifier::fit(cc, scaler.transform(b.x), b.y, 1));
  std::stringstream buf;
  write_model(buf, m);
  const std::string text = buf.str();
  std::stringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(read_model(truncated), Error);
  EXPECT_THROW(load_model("/nonexistent/model.txt"), Error);
}
