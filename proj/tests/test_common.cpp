#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "proteus/common.hpp"
#include "proteus/dataset.hpp"

using namespace proteus;

namespace {

std::string temp_file(const std::string& name, const std::string& contents) {
  auto p = std::filesystem::temp_directory_path() / ("proteus_test_" + name);
  std::ofstream(p) << contents;
  return p.string();
}

}  // namespace

TEST(Seeds, DeriveIsDeterministicAndSpreads) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
}

TEST(ParallelFor, EachIndexOnce) {
  for (int jobs : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, RethrowsOnCaller) {
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) { if (i == 7) throw Error("boom"); }), Error);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Scaler, PopulationStdAndConstantColumn) {
  Matrix x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto s = StandardScaler::fit(x);
  EXPECT_DOUBLE_EQ(s.means()(0), 2.5);
  EXPECT_DOUBLE_EQ(s.std_devs()(0), std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(s.std_devs()(1), 1.0);
  const Matrix z = s.transform(x);
  EXPECT_NEAR(z.col(0).mean(), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(z(2, 1), 0.0);
}

TEST(Scaler, AfterComposes) {
  Matrix x = Matrix::Random(30, 3) * 4.0;
  x.col(1).array() += 7.0;
  const auto inner = StandardScaler::fit(x);
  const Matrix z = inner.transform(x);
  const auto outer = StandardScaler::fit(z.block(0, 0, 10, 3));
  const auto both = outer.after(inner);
  const Matrix a = outer.transform(z);
  const Matrix b = both.transform(x);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Csv, RoundTripWithLabels) {
  Dataset d;
  d.values = Matrix::Random(5, 2);
  d.feature_names = {"a", "b"};
  d.gold_labels = Labels{0, 1, 0, 0, 1};
  const auto path = (std::filesystem::temp_directory_path() / "proteus_test_rt.csv").string();
  write_csv(path, d);
  CsvOptions o;
  o.label_column = "is_anomaly";
  const Dataset back = load_csv(path, o);
  EXPECT_EQ(back.feature_names, d.feature_names);
  EXPECT_EQ(*back.gold_labels, *d.gold_labels);
  EXPECT_EQ(back.values, d.values);
}

TEST(Csv, Errors) {
  EXPECT_THROW(load_csv("/nonexistent/x.csv"), Error);
  EXPECT_THROW(load_csv(temp_file("ragged.csv", "a,b\n1,2\n3\n")), Error);
  EXPECT_THROW(load_csv(temp_file("text.csv", "a,b\n1,x\n")), Error);
  EXPECT_THROW(load_csv(temp_file("nan.csv", "a,b\n1,nan\n")), Error);
  EXPECT_THROW(load_csv(temp_file("dup.csv", "a,a\n1,2\n")), Error);
  EXPECT_THROW(load_csv(temp_file("empty.csv", "a,b\n")), Error);
  CsvOptions o;
  o.label_column = "y";
  EXPECT_THROW(load_csv(temp_file("nolabel.csv", "a,b\n1,2\n"), o), Error);
  EXPECT_THROW(load_csv(temp_file("badlabel.csv", "a,y\n1,2\n"), o), Error);
}

TEST(Split, StratifiedAndDisjoint) {
  Labels y(100, 0);
  for (int i = 0; i < 10; ++i) y[i * 10] = 1;
  const Split s = stratified_split(y, 0.7, 5);
  EXPECT_EQ(s.train.size() + s.test.size(), 100u);
  std::size_t pos = 0;
  for (auto i : s.train) pos += y[i];
  EXPECT_EQ(pos, 7u);
  std::vector<int> seen(100, 0);
  for (auto i : s.train) seen[i]++;
  for (auto i : s.test) seen[i]++;
  for (int v : seen) EXPECT_EQ(v, 1);
}

TEST(Synthetic, ParentShapeAndDilution) {
  const HicsParent p = make_hics_like_parent(3);
  EXPECT_EQ(p.dataset.rows(), kHicsSamples);
  EXPECT_EQ(p.dataset.cols(), 5u);
  EXPECT_EQ(count_positive(*p.dataset.gold_labels), kHicsAnomalies);
  EXPECT_EQ(p.dataset.gold_features.size(), 5u);
  const Dataset wide = generate_synthetic(p.dataset, 15, 4);
  EXPECT_EQ(wide.cols(), 20u);
  EXPECT_EQ(wide.feature_names[5], "irr_1");
  EXPECT_EQ(wide.values.leftCols(5), p.dataset.values);
  // Anomalies stay inside the marginal ranges: no single feature gives them away.
  for (std::size_t c = 0; c < 5; ++c) {
    const auto z = StandardScaler::fit(p.dataset.values).transform(p.dataset.values);
    for (std::size_t i = 0; i < p.dataset.rows(); ++i) {
      if ((*p.dataset.gold_labels)[i]) EXPECT_LT(std::abs(z(i, c)), 3.0);
    }
  }
}
