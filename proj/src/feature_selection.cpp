#include "proteus/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace proteus {

std::string to_string(SelectorAlgorithm a) {
  switch (a) {
    case SelectorAlgorithm::Lasso: return "lasso";
    case SelectorAlgorithm::Fbed: return "fbed";
    case SelectorAlgorithm::Full: return "full";
    case SelectorAlgorithm::Fixed: return "fixed";
  }
  return "unknown";
}

std::string SelectorConfig::id() const {
  std::ostringstream s;
  s << to_string(algorithm);
  switch (algorithm) {
    case SelectorAlgorithm::Lasso: s << "(lambda=" << lambda << ")"; break;
    case SelectorAlgorithm::Fbed: s << "(alpha=" << alpha << ",k=" << k_runs << ")"; break;
    case SelectorAlgorithm::Full: break;
    case SelectorAlgorithm::Fixed:
      s << "(";
      for (std::size_t i = 0; i < fixed.size(); ++i) s << (i ? " " : "") << fixed[i];
      s << ")";
      break;
  }
  return s.str();
}

void SelectorConfig::validate() const {
  if (cap < 1) throw Error("selector: cap must be >= 1");
  if (algorithm == SelectorAlgorithm::Lasso && !(lambda > 0.0)) throw Error("selector: lambda must be > 0");
  if (algorithm == SelectorAlgorithm::Fbed && !(alpha > 0.0 && alpha < 1.0)) {
    throw Error("selector: alpha must be in (0,1)");
  }
}

namespace {

void check_inputs(const Matrix& x, std::size_t n_targets) {
  if (static_cast<std::size_t>(x.rows()) != n_targets) throw Error("selector: row/target count mismatch");
  if (x.rows() < 2) throw Error("selector: need at least 2 rows");
}

SelectionResult rank_and_cap(std::vector<std::size_t> features, std::vector<double> scores, std::size_t cap) {
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return features[a] < features[b];
  });
  SelectionResult out;
  for (std::size_t k = 0; k < order.size() && k < cap; ++k) {
    out.selected.push_back(features[order[k]]);
    out.scores.push_back(scores[order[k]]);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lasso

double lasso_lambda_max(const Matrix& x, std::span<const double> y) {
  check_inputs(x, y.size());
  Eigen::Map<const Vector> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  Vector xty = x.transpose() * yv;
  return xty.cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

Vector lasso_coordinate_descent(const Matrix& x, std::span<const double> y, double lambda,
                                const LassoOptions& options, const Vector& warm_start) {
  check_inputs(x, y.size());
  if (!(lambda > 0.0)) throw Error("lasso: lambda must be > 0");
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::MatrixXd xc = x;  // column-major copy for column sweeps
  Eigen::Map<const Vector> yv(y.data(), n);

  Vector beta = warm_start.size() == d ? warm_start : Vector::Zero(d);
  Vector residual = yv - xc * beta;
  Vector col_scale = xc.colwise().squaredNorm().transpose() * inv_n;

  auto update = [&](Eigen::Index j) {
    if (col_scale[j] <= 0.0) {
      double old = beta[j];
      beta[j] = 0.0;
      return std::abs(old);
    }
    const double rho = xc.col(j).dot(residual) * inv_n + col_scale[j] * beta[j];
    double next = 0.0;
    if (rho > lambda) next = (rho - lambda) / col_scale[j];
    else if (rho < -lambda) next = (rho + lambda) / col_scale[j];
    const double delta = next - beta[j];
    if (delta != 0.0) {
      residual -= delta * xc.col(j);
      beta[j] = next;
    }
    return std::abs(delta);
  };

  // Full sweeps alternate with sweeps over the active set until a full sweep
  // changes nothing beyond tolerance.
  std::size_t sweeps = 0;
  while (sweeps < options.max_sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) max_change = std::max(max_change, update(j));
    ++sweeps;
    if (max_change < options.tolerance) break;
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (beta[j] != 0.0) active.push_back(j);
    }
    while (sweeps < options.max_sweeps) {
      double change = 0.0;
      for (Eigen::Index j : active) change = std::max(change, update(j));
      ++sweeps;
      if (change < options.tolerance) break;
    }
  }
  return beta;
}

SelectionResult select_lasso(const Matrix& x, std::span<const double> y, double lambda, std::size_t cap) {
  Vector beta = lasso_coordinate_descent(x, y, lambda);
  std::vector<std::size_t> features;
  std::vector<double> scores;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) {
      features.push_back(static_cast<std::size_t>(j));
      scores.push_back(std::abs(beta[j]));
    }
  }
  return rank_and_cap(std::move(features), std::move(scores), cap);
}

// ---------------------------------------------------------------------------
// Logistic regression and the likelihood-ratio test

namespace {

constexpr double kRidge = 1e-8;
constexpr std::size_t kMaxNewton = 100;

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double deviance_of(const Eigen::MatrixXd& z, const Vector& y, const Vector& beta) {
  Vector eta = z * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
  return -2.0 * ll;
}

}  // namespace

LogisticFit fit_logistic(const Matrix& x, const Labels& y, std::span<const std::size_t> columns) {
  check_inputs(x, y.size());
  const Eigen::Index n = x.rows();
  const auto p = static_cast<Eigen::Index>(columns.size()) + 1;
  Eigen::MatrixXd z(n, p);
  z.col(0).setOnes();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    z.col(static_cast<Eigen::Index>(c) + 1) = x.col(static_cast<Eigen::Index>(columns[c]));
  }
  Vector yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv[i] = y[static_cast<std::size_t>(i)] ? 1.0 : 0.0;

  LogisticFit fit;
  Vector beta = Vector::Zero(p);
  // Start the intercept at the marginal log-odds.
  const double mean_y = std::clamp(yv.mean(), 1e-6, 1.0 - 1e-6);
  beta[0] = std::log(mean_y / (1.0 - mean_y));

  auto objective = [&](const Vector& b) { return deviance_of(z, yv, b) + kRidge * b.squaredNorm(); };
  double current = objective(beta);

  for (std::size_t it = 0; it < kMaxNewton; ++it) {
    Vector eta = z * beta;
    Vector mu(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu[i] = sigmoid(eta[i]);
      w[i] = mu[i] * (1.0 - mu[i]);
    }
    Vector grad = z.transpose() * (yv - mu) - kRidge * beta;
    Eigen::MatrixXd hess = z.transpose() * w.asDiagonal() * z;
    hess.diagonal().array() += kRidge;
    Vector step = hess.ldlt().solve(grad);
    if (!step.allFinite()) break;

    double scale = 1.0;
    Vector candidate = beta + step;
    double next = objective(candidate);
    for (int halvings = 0; halvings < 30 && !(next <= current); ++halvings) {
      scale *= 0.5;
      candidate = beta + scale * step;
      next = objective(candidate);
    }
    fit.iterations = it + 1;
    if (!(next <= current)) {
      fit.converged = true;  // no descent direction left
      break;
    }
    const double improvement = current - next;
    beta = std::move(candidate);
    current = next;
    if (improvement < 1e-9 * (std::abs(current) + 1.0)) {
      fit.converged = true;
      break;
    }
  }
  fit.coefficients = beta;
  fit.deviance = deviance_of(z, yv, beta);
  return fit;
}

double chi2_1_pvalue(double statistic) {
  if (!(statistic > 0.0)) return 1.0;
  return std::erfc(std::sqrt(statistic / 2.0));
}

// ---------------------------------------------------------------------------
// FBED

namespace {

class FbedState {
 public:
  FbedState(const Matrix& x, const Labels& y) : x_(x), y_(y) {}

  double deviance(const std::vector<std::size_t>& set) const { return fit_logistic(x_, y_, set).deviance; }

  // LR statistic for adding f to `set` whose deviance is `base`.
  double add_statistic(const std::vector<std::size_t>& set, double base, std::size_t f) const {
    std::vector<std::size_t> with = set;
    with.push_back(f);
    return std::max(0.0, base - deviance(with));
  }

 private:
  const Matrix& x_;
  const Labels& y_;
};

}  // namespace

SelectionResult select_fbed(const Matrix& x, const Labels& y, double alpha, std::size_t k_runs, std::size_t cap) {
  check_inputs(x, y.size());
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("fbed: alpha must be in (0,1)");
  const auto d = static_cast<std::size_t>(x.cols());
  FbedState state(x, y);

  std::vector<std::size_t> selected;
  std::vector<char> in_set(d, 0);

  for (std::size_t run = 0; run <= k_runs; ++run) {
    std::vector<std::size_t> remaining;
    for (std::size_t f = 0; f < d; ++f) {
      if (!in_set[f]) remaining.push_back(f);
    }
    const std::size_t before = selected.size();
    double base = state.deviance(selected);
    while (!remaining.empty()) {
      std::vector<std::size_t> keep;
      std::vector<double> keep_stat;
      for (std::size_t f : remaining) {
        const double stat = state.add_statistic(selected, base, f);
        if (chi2_1_pvalue(stat) < alpha) {
          keep.push_back(f);
          keep_stat.push_back(stat);
        }
      }
      // Early dropping: anything not significant now is out for this run.
      if (keep.empty()) break;
      // The smallest p-value is the largest statistic; ties go to the lower index.
      std::size_t best = 0;
      for (std::size_t m = 1; m < keep.size(); ++m) {
        if (keep_stat[m] > keep_stat[best]) best = m;
      }
      const std::size_t f = keep[best];
      selected.push_back(f);
      in_set[f] = 1;
      keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(best));
      remaining = std::move(keep);
      base = state.deviance(selected);
    }
    if (selected.size() == before) break;
  }

  // Backward phase: drop the least significant feature while it is not significant.
  std::vector<double> stats;
  for (;;) {
    stats.assign(selected.size(), 0.0);
    if (selected.empty()) break;
    const double full = state.deviance(selected);
    std::size_t worst = 0;
    for (std::size_t m = 0; m < selected.size(); ++m) {
      std::vector<std::size_t> without = selected;
      without.erase(without.begin() + static_cast<std::ptrdiff_t>(m));
      stats[m] = std::max(0.0, state.deviance(without) - full);
      if (stats[m] < stats[worst]) worst = m;
    }
    if (chi2_1_pvalue(stats[worst]) >= alpha) {
      selected.erase(selected.begin() + static_cast<std::ptrdiff_t>(worst));
      continue;
    }
    break;
  }
  return rank_and_cap(std::move(selected), std::move(stats), cap);
}

// ---------------------------------------------------------------------------

SelectionResult select_full(std::size_t d) {
  SelectionResult out;
  out.selected.resize(d);
  std::iota(out.selected.begin(), out.selected.end(), 0);
  out.scores.assign(d, 0.0);
  return out;
}

SelectionResult select_topk_importance(std::span<const double> importances, std::size_t k) {
  if (k < 1) throw Error("top-k selection: k must be >= 1");
  std::vector<std::size_t> features(importances.size());
  std::iota(features.begin(), features.end(), 0);
  return rank_and_cap(std::move(features), std::vector<double>(importances.begin(), importances.end()), k);
}

SelectionResult run_selector(const SelectorConfig& config, const Matrix& x, const Labels& y) {
  config.validate();
  switch (config.algorithm) {
    case SelectorAlgorithm::Lasso: {
      std::vector<double> target(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) target[i] = y[i] ? 1.0 : -1.0;
      return select_lasso(x, target, config.lambda, config.cap);
    }
    case SelectorAlgorithm::Fbed:
      return select_fbed(x, y, config.alpha, config.k_runs, config.cap);
    case SelectorAlgorithm::Full:
      return select_full(static_cast<std::size_t>(x.cols()));
    case SelectorAlgorithm::Fixed: {
      SelectionResult out;
      for (std::size_t f : config.fixed) {
        if (f >= static_cast<std::size_t>(x.cols())) throw Error("fixed selector: feature out of range");
        if (out.selected.size() == config.cap) break;
        out.selected.push_back(f);
        out.scores.push_back(0.0);
      }
      return out;
    }
  }
  throw Error("unknown selector");
}

}  // namespace proteus
