#pragma once

#include <limits>
#include <string>
#include <vector>

#include "proteus/common.hpp"

namespace proteus {

enum class SelectorAlgorithm {
  Lasso,
  Fbed,
  Full,
  // A precomputed feature list (e.g. top-k LODA importances); ignores the data.
  Fixed,
};

std::string to_string(SelectorAlgorithm a);

struct SelectorConfig {
  SelectorAlgorithm algorithm = SelectorAlgorithm::Full;
  double lambda = 0.01;     // Lasso
  double alpha = 0.05;      // FBED significance level
  std::size_t k_runs = 0;   // FBED extra forward runs
  std::size_t cap = 10;
  std::vector<std::size_t> fixed;

  // Stable, human-readable identifier, e.g. "lasso(lambda=0.01)".
  std::string id() const;
  void validate() const;
};

/// Selected feature indices, best first, with the score that ranked them.
struct SelectionResult {
  std::vector<std::size_t> selected;
  std::vector<double> scores;

  bool empty() const { return selected.empty(); }
};

struct LassoOptions {
  double tolerance = 1e-7;  // on the largest coordinate change in a sweep
  std::size_t max_sweeps = 1000;
};

// max_j |X_j' y| / n: the smallest lambda with an all-zero solution.
double lasso_lambda_max(const Matrix& x, std::span<const double> y);

// Coordinate descent for  1/2 ||y - X b||^2 / n + lambda ||b||_1  (no intercept;
// X is expected to be column-centered). `warm_start` may be empty.
Vector lasso_coordinate_descent(const Matrix& x, std::span<const double> y, double lambda,
                                const LassoOptions& options = {}, const Vector& warm_start = Vector());

// y holds +-1 targets.
SelectionResult select_lasso(const Matrix& x, std::span<const double> y, double lambda, std::size_t cap);

struct LogisticFit {
  Vector coefficients;  // intercept first
  double deviance = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Damped Newton with a tiny ridge (1e-8), at most 100 iterations. An
// intercept column is added internally; `columns` picks the predictors.
LogisticFit fit_logistic(const Matrix& x, const Labels& y, std::span<const std::size_t> columns);

// Upper tail of chi-square with one degree of freedom.
double chi2_1_pvalue(double statistic);

SelectionResult select_fbed(const Matrix& x, const Labels& y, double alpha, std::size_t k_runs, std::size_t cap);

// All features in native order, uncapped, scores 0.
SelectionResult select_full(std::size_t d);

// The k largest importances, descending; ties go to the lower index.
SelectionResult select_topk_importance(std::span<const double> importances, std::size_t k);

// Dispatch on config.algorithm. Labels are 0/1; Lasso sees them as -1/+1.
SelectionResult run_selector(const SelectorConfig& config, const Matrix& x, const Labels& y);

}  // namespace proteus
