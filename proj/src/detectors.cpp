#include "proteus/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

namespace proteus {

std::string to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::IsolationForest: return "iforest";
    case DetectorKind::Lof: return "lof";
    case DetectorKind::Loda: return "loda";
  }
  return "unknown";
}

DetectorKind parse_detector_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "iforest" || s == "if" || s == "isolation_forest") return DetectorKind::IsolationForest;
  if (s == "lof") return DetectorKind::Lof;
  if (s == "loda") return DetectorKind::Loda;
  throw Error("unknown detector '" + name + "' (expected iforest, lof or loda)");
}

double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  constexpr double kEulerGamma = 0.5772156649015329;
  const double m = static_cast<double>(n - 1);
  return 2.0 * (std::log(m) + kEulerGamma) - 2.0 * m / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Isolation forest

IsolationTree IsolationTree::grow(const Matrix& x, std::vector<std::size_t> rows, std::size_t depth_limit,
                                  std::mt19937_64& rng) {
  IsolationTree tree;
  tree.nodes_.reserve(2 * rows.size());
  tree.build(x, rows, 0, rows.size(), 0, depth_limit, rng);
  return tree;
}

int IsolationTree::build(const Matrix& x, std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
                         std::size_t depth, std::size_t depth_limit, std::mt19937_64& rng) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[id].size = end - begin;
  if (depth >= depth_limit || end - begin <= 1) return id;

  // Only features that vary inside the node can split it.
  std::vector<int> candidates;
  std::vector<double> lo(x.cols()), hi(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (std::size_t r = begin; r < end; ++r) {
      double v = x(static_cast<Eigen::Index>(rows[r]), j);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    lo[j] = mn;
    hi[j] = mx;
    if (mx > mn) candidates.push_back(static_cast<int>(j));
  }
  if (candidates.empty()) return id;

  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  const int f = candidates[pick(rng)];
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double split = lo[f] + unit(rng) * (hi[f] - lo[f]);
  if (!(split > lo[f])) split = 0.5 * (lo[f] + hi[f]);

  auto mid_it = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                               rows.begin() + static_cast<std::ptrdiff_t>(end),
                               [&](std::size_t r) { return x(static_cast<Eigen::Index>(r), f) < split; });
  const auto mid = static_cast<std::size_t>(mid_it - rows.begin());

  nodes_[id].feature = f;
  nodes_[id].split = split;
  const int left = build(x, rows, begin, mid, depth + 1, depth_limit, rng);
  const int right = build(x, rows, mid, end, depth + 1, depth_limit, rng);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double IsolationTree::path_length(std::span<const double> x) const {
  int node = 0;
  double depth = 0.0;
  while (nodes_[node].feature >= 0) {
    const Node& n = nodes_[node];
    node = x[static_cast<std::size_t>(n.feature)] < n.split ? n.left : n.right;
    depth += 1.0;
  }
  return depth + average_path_length(nodes_[node].size);
}

IsolationForest IsolationForest::fit(const Matrix& x, const IsolationForestParams& params) {
  if (x.cols() == 0) throw Error("isolation forest: data has no features");
  if (x.rows() < 2) throw Error("isolation forest: need at least 2 samples");
  if (params.n_trees < 1) throw Error("isolation forest: n_trees must be >= 1");
  if (params.subsample_size < 2) throw Error("isolation forest: subsample size must be >= 2");

  IsolationForest forest;
  forest.dim_ = static_cast<std::size_t>(x.cols());
  forest.psi_ = std::min(params.subsample_size, static_cast<std::size_t>(x.rows()));
  const auto depth_limit = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(forest.psi_))));

  std::mt19937_64 rng(params.seed);
  std::vector<std::size_t> all(static_cast<std::size_t>(x.rows()));
  std::iota(all.begin(), all.end(), 0);
  forest.trees_.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    // Partial Fisher-Yates: the first psi entries become the subsample.
    for (std::size_t i = 0; i < forest.psi_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    std::vector<std::size_t> sample(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(forest.psi_));
    forest.trees_.push_back(IsolationTree::grow(x, std::move(sample), depth_limit, rng));
  }
  return forest;
}

double IsolationForest::score(std::span<const double> x) const {
  if (x.size() != dim_) throw Error("isolation forest: dimension mismatch");
  double total = 0.0;
  for (const auto& tree : trees_) total += tree.path_length(x);
  const double mean = total / static_cast<double>(trees_.size());
  return std::exp2(-mean / average_path_length(psi_));
}

// ---------------------------------------------------------------------------
// LOF

LocalOutlierFactor LocalOutlierFactor::fit(const Matrix& x, const LofParams& params) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (params.k_neighbors < 1 || params.k_neighbors >= n) {
    throw Error("lof: need 1 <= k < n (k=" + std::to_string(params.k_neighbors) + ", n=" + std::to_string(n) + ")");
  }
  LocalOutlierFactor lof;
  lof.data_ = x;
  lof.k_ = params.k_neighbors;

  std::vector<Neighbors> neighbors(n);
  lof.k_distance_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbors[i] = lof.nearest(row_of(x, static_cast<Eigen::Index>(i)), static_cast<std::ptrdiff_t>(i));
    lof.k_distance_[i] = neighbors[i].distance.back();
  }
  lof.lrd_.resize(n);
  for (std::size_t i = 0; i < n; ++i) lof.lrd_[i] = lof.local_reachability(neighbors[i]);
  lof.training_scores_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t o : neighbors[i].index) sum += lof.lrd_[o];
    lof.training_scores_[i] = sum / static_cast<double>(lof.k_) / lof.lrd_[i];
  }
  return lof;
}

LocalOutlierFactor::Neighbors LocalOutlierFactor::nearest(std::span<const double> x, std::ptrdiff_t exclude) const {
  const auto n = static_cast<std::size_t>(data_.rows());
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<std::ptrdiff_t>(i) == exclude) continue;
    auto r = row_of(data_, static_cast<Eigen::Index>(i));
    double ss = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      double t = x[j] - r[j];
      ss += t * t;
    }
    d.emplace_back(std::sqrt(ss), i);
  }
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k_), d.end());
  Neighbors nb;
  for (std::size_t m = 0; m < k_; ++m) {
    nb.distance.push_back(d[m].first);
    nb.index.push_back(d[m].second);
  }
  return nb;
}

double LocalOutlierFactor::local_reachability(const Neighbors& nb) const {
  double sum = 0.0;
  for (std::size_t m = 0; m < nb.index.size(); ++m) {
    sum += std::max(k_distance_[nb.index[m]], nb.distance[m]);
  }
  return 1.0 / std::max(sum / static_cast<double>(nb.index.size()), kDistanceFloor);
}

double LocalOutlierFactor::score(std::span<const double> x) const {
  if (x.size() != dim()) throw Error("lof: dimension mismatch");
  Neighbors nb = nearest(x, -1);
  const double lrd_x = local_reachability(nb);
  double sum = 0.0;
  for (std::size_t o : nb.index) sum += lrd_[o];
  return sum / static_cast<double>(k_) / lrd_x;
}

// ---------------------------------------------------------------------------
// LODA

double Loda::Projection::project(std::span<const double> x) const {
  double v = 0.0;
  for (std::size_t m = 0; m < features.size(); ++m) v += weights[m] * x[features[m]];
  return v;
}

double Loda::Projection::bin_probability(double v) const {
  const std::size_t bins = probability.size();
  if (width <= 0.0) return v == lo ? std::max(probability[0], kProbabilityFloor) : kProbabilityFloor;
  const double hi = lo + width * static_cast<double>(bins);
  if (v < lo || v > hi) return kProbabilityFloor;
  auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
  if (b >= bins) b = bins - 1;
  return std::max(probability[b], kProbabilityFloor);
}

Loda Loda::fit(const Matrix& x, const LodaParams& params) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());
  if (n < 2) throw Error("loda: need at least 2 samples");
  if (d == 0) throw Error("loda: data has no features");
  if (params.n_projections < 1) throw Error("loda: need at least one projection");

  const std::size_t bins = params.n_bins > 0
                               ? params.n_bins
                               : static_cast<std::size_t>(std::ceil(1.0 + std::log2(static_cast<double>(n))));
  const auto nnz = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

  Loda model;
  model.dim_ = d;
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> features(d);
  std::iota(features.begin(), features.end(), 0);
  std::vector<double> projected(n);

  for (std::size_t p = 0; p < params.n_projections; ++p) {
    Projection proj;
    for (std::size_t m = 0; m < nnz; ++m) {
      std::uniform_int_distribution<std::size_t> pick(m, d - 1);
      std::swap(features[m], features[pick(rng)]);
    }
    proj.features.assign(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(nnz));
    std::sort(proj.features.begin(), proj.features.end());
    for (std::size_t m = 0; m < nnz; ++m) proj.weights.push_back(normal(rng));

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      projected[i] = proj.project(row_of(x, static_cast<Eigen::Index>(i)));
      lo = std::min(lo, projected[i]);
      hi = std::max(hi, projected[i]);
    }
    proj.lo = lo;
    if (hi > lo) {
      proj.width = (hi - lo) / static_cast<double>(bins);
      proj.probability.assign(bins, 0.0);
    } else {
      proj.width = 0.0;
      proj.probability.assign(1, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t b = 0;
      if (proj.width > 0.0) {
        b = static_cast<std::size_t>(std::floor((projected[i] - lo) / proj.width));
        if (b >= bins) b = bins - 1;
      }
      proj.probability[b] += 1.0;
    }
    for (double& c : proj.probability) c /= static_cast<double>(n);
    model.projections_.push_back(std::move(proj));
  }
  return model;
}

std::vector<double> Loda::neg_log_probabilities(std::span<const double> x) const {
  if (x.size() != dim_) throw Error("loda: dimension mismatch");
  std::vector<double> out(projections_.size());
  for (std::size_t p = 0; p < projections_.size(); ++p) {
    out[p] = -std::log(projections_[p].bin_probability(projections_[p].project(x)));
  }
  return out;
}

double Loda::score(std::span<const double> x) const {
  auto nlp = neg_log_probabilities(x);
  return std::accumulate(nlp.begin(), nlp.end(), 0.0) / static_cast<double>(nlp.size());
}

std::vector<double> Loda::feature_contributions(std::span<const double> x) const {
  auto nlp = neg_log_probabilities(x);
  std::vector<double> with_sum(dim_, 0.0);
  std::vector<std::size_t> with_count(dim_, 0);
  double total = 0.0;
  for (std::size_t p = 0; p < projections_.size(); ++p) {
    total += nlp[p];
    for (std::size_t f : projections_[p].features) {
      with_sum[f] += nlp[p];
      with_count[f] += 1;
    }
  }
  const std::size_t k = projections_.size();
  std::vector<double> out(dim_, 0.0);
  for (std::size_t j = 0; j < dim_; ++j) {
    if (with_count[j] == 0 || with_count[j] == k) continue;
    const double with_mean = with_sum[j] / static_cast<double>(with_count[j]);
    const double without_mean = (total - with_sum[j]) / static_cast<double>(k - with_count[j]);
    out[j] = with_mean - without_mean;
  }
  return out;
}

std::vector<double> mean_loda_contributions(const Loda& model, const Matrix& x, std::span<const std::size_t> rows) {
  std::vector<double> mean(model.dim(), 0.0);
  if (rows.empty()) return mean;
  for (std::size_t r : rows) {
    auto c = model.feature_contributions(row_of(x, static_cast<Eigen::Index>(r)));
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += c[j];
  }
  for (double& v : mean) v /= static_cast<double>(rows.size());
  return mean;
}

// ---------------------------------------------------------------------------
// DetectorModel

DetectorModel DetectorModel::fit(const Matrix& x, const DetectorParams& params, std::vector<std::size_t> input_columns) {
  DetectorModel model;
  model.input_dim_ = static_cast<std::size_t>(x.cols());
  for (std::size_t c : input_columns) {
    if (c >= model.input_dim_) throw Error("detector: input column out of range");
  }
  model.input_columns_ = std::move(input_columns);
  const Matrix fit_data = model.input_columns_.empty() ? x : take_cols(x, model.input_columns_);

  switch (params.kind) {
    case DetectorKind::IsolationForest:
      model.impl_ = IsolationForest::fit(fit_data, params.iforest);
      break;
    case DetectorKind::Lof:
      model.impl_ = LocalOutlierFactor::fit(fit_data, params.lof);
      break;
    case DetectorKind::Loda:
      model.impl_ = Loda::fit(fit_data, params.loda);
      break;
  }
  if (const auto* lof = std::get_if<LocalOutlierFactor>(&model.impl_)) {
    model.training_scores_ = lof->training_scores();
  } else {
    model.training_scores_ = model.score_all(x);
  }
  return model;
}

DetectorKind DetectorModel::kind() const {
  switch (impl_.index()) {
    case 0: return DetectorKind::IsolationForest;
    case 1: return DetectorKind::Lof;
    default: return DetectorKind::Loda;
  }
}

double DetectorModel::score(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw Error("detector: expected " + std::to_string(input_dim_) + " features, got " + std::to_string(x.size()));
  }
  if (input_columns_.empty()) {
    return std::visit([&](const auto& m) { return m.score(x); }, impl_);
  }
  std::vector<double> projected(input_columns_.size());
  for (std::size_t m = 0; m < input_columns_.size(); ++m) projected[m] = x[input_columns_[m]];
  return std::visit([&](const auto& m) { return m.score(projected); }, impl_);
}

std::vector<double> DetectorModel::score_all(const Matrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = score(row_of(x, i));
  return out;
}

Binarization binarize(std::span<const double> scores, double anomaly_ratio) {
  if (!(anomaly_ratio > 0.0 && anomaly_ratio < 1.0)) throw Error("binarize: anomaly ratio must be in (0,1)");
  if (scores.empty()) throw Error("binarize: no scores");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw Error("binarize: degenerate score distribution");

  const double pos = (1.0 - anomaly_ratio) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);

  Binarization out;
  out.threshold = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  out.labels.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out.labels[i] = scores[i] > out.threshold ? 1 : 0;
  return out;
}

}  // namespace proteus
