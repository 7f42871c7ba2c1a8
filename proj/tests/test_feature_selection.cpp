#include <gtest/gtest.h>

#include <random>

#include "proteus/feature_selection.hpp"

using namespace proteus;

namespace {

Matrix centered_noise(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  x.rowwise() -= x.colwise().mean();
  return x;
}

}  // namespace

TEST(Lasso, LambdaMaxZeroesEverything) {
  const Matrix x = centered_noise(100, 6, 1);
  std::vector<double> y(100);
  for (std::size_t i = 0; i < 100; ++i) y[i] = x(static_cast<Eigen::Index>(i), 2) + 0.1 * x(static_cast<Eigen::Index>(i), 4);
  const double lmax = lasso_lambda_max(x, y);
  EXPECT_EQ(lasso_coordinate_descent(x, y, lmax * 1.0001).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(lasso_coordinate_descent(x, y, lmax * 0.9).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lasso, KktConditions) {
  const Matrix x = centered_noise(80, 10, 2);
  std::vector<double> y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    y[i] = 2 * x(r, 0) - x(r, 3) + 0.5 * x(r, 7) + 0.3 * std::sin(static_cast<double>(i));
  }
  const double lambda = 0.1;
  LassoOptions o;
  o.tolerance = 1e-10;
  o.max_sweeps = 100000;
  const Vector b = lasso_coordinate_descent(x, y, lambda, o);
  const Eigen::Map<const Vector> yv(y.data(), 80);
  const Vector grad = x.transpose() * (yv - x * b) / 80.0;
  for (Eigen::Index j = 0; j < 10; ++j) {
    if (b(j) != 0.0) {
      EXPECT_NEAR(grad(j), lambda * (b(j) > 0 ? 1.0 : -1.0), 1e-6);
    } else {
      EXPECT_LE(std::abs(grad(j)), lambda + 1e-6);
    }
  }
}

TEST(Lasso, SelectionIsCappedAndOrdered) {
  const Matrix x = centered_noise(200, 20, 3);
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) y[i] = x(static_cast<Eigen::Index>(i), 5) > 0 ? 1.0 : -1.0;
  const auto s = select_lasso(x, y, 1e-4, 4);
  ASSERT_EQ(s.selected.size(), 4u);
  EXPECT_EQ(s.selected[0], 5u);
  for (std::size_t i = 1; i < s.scores.size(); ++i) EXPECT_GE(s.scores[i - 1], s.scores[i]);
}

TEST(Fbed, FindsSignalIgnoresNoise) {
  std::mt19937_64 rng(4);
  const Matrix x = centered_noise(400, 8, 4);
  Labels y(400);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t i = 0; i < 400; ++i) {
    const double eta = 2.5 * x(static_cast<Eigen::Index>(i), 1) - 2.0 * x(static_cast<Eigen::Index>(i), 6);
    y[i] = u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
  }
  const auto s = select_fbed(x, y, 0.01, 1, 10);
  ASSERT_GE(s.selected.size(), 2u);
  EXPECT_TRUE(std::find(s.selected.begin(), s.selected.end(), 1u) != s.selected.end());
  EXPECT_TRUE(std::find(s.selected.begin(), s.selected.end(), 6u) != s.selected.end());
}

TEST(Fbed, PureNoiseSelectsLittle) {
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = centered_noise(200, 10, 100 + seed);
    Labels y(200);
    std::mt19937_64 rng(seed);
    for (auto& v : y) v = static_cast<int>(rng() % 2);
    total += select_fbed(x, y, 0.05, 0, 10).selected.size();
  }
  // Expected false positives per run is about alpha * d = 0.5.
  EXPECT_LE(total, 15u);
}

TEST(Logistic, RecoversCoefficients) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  const Matrix x = centered_noise(3000, 2, 9);
  Labels y(3000);
  for (std::size_t i = 0; i < 3000; ++i) {
    const double eta = -0.5 + 1.5 * x(static_cast<Eigen::Index>(i), 0);
    y[i] = u(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0;
  }
  const std::vector<std::size_t> cols{0};
  const auto fit = fit_logistic(x, y, cols);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.coefficients(0), -0.5, 0.15);
  EXPECT_NEAR(fit.coefficients(1), 1.5, 0.2);
}

TEST(Chi2, KnownValues) {
  EXPECT_NEAR(chi2_1_pvalue(3.841458820694124), 0.05, 1e-9);
  EXPECT_NEAR(chi2_1_pvalue(0.0), 1.0, 1e-12);
}

TEST(Selectors, FullTopkAndIds) {
  EXPECT_EQ(select_full(3).selected, (std::vector<std::size_t>{0, 1, 2}));
  const std::vector<double> imp{0.5, 2.0, 0.5, 1.0};
  EXPECT_EQ(select_topk_importance(imp, 3).selected, (std::vector<std::size_t>{1, 3, 0}));
  SelectorConfig c;
  c.algorithm = SelectorAlgorithm::Lasso;
  c.lambda = 0.01;
  EXPECT_EQ(c.id(), "lasso(lambda=0.01)");
  c.lambda = -1;
  EXPECT_THROW(c.validate(), Error);
}
