#include "proteus/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace proteus {

std::string to_string(ClassifierAlgorithm a) {
  switch (a) {
    case ClassifierAlgorithm::Knn: return "knn";
    case ClassifierAlgorithm::RandomForest: return "rf";
    case ClassifierAlgorithm::LinearSvm: return "svm";
  }
  return "unknown";
}

std::string ClassifierConfig::id() const {
  std::ostringstream s;
  s << to_string(algorithm);
  switch (algorithm) {
    case ClassifierAlgorithm::Knn: s << "(k=" << k << ")"; break;
    case ClassifierAlgorithm::RandomForest: s << "(trees=" << n_trees << ",min_leaf=" << min_leaf << ")"; break;
    case ClassifierAlgorithm::LinearSvm: s << "(C=" << c << ")"; break;
  }
  return s.str();
}

void ClassifierConfig::validate() const {
  switch (algorithm) {
    case ClassifierAlgorithm::Knn:
      if (k < 1 || k % 2 == 0) throw Error("knn: k must be odd and >= 1");
      break;
    case ClassifierAlgorithm::RandomForest:
      if (n_trees < 1) throw Error("rf: n_trees must be >= 1");
      if (min_leaf < 1) throw Error("rf: min_leaf must be >= 1");
      break;
    case ClassifierAlgorithm::LinearSvm:
      if (!(c > 0.0)) throw Error("svm: C must be > 0");
      if (epochs < 1) throw Error("svm: epochs must be >= 1");
      break;
  }
}

namespace {

void check_training_set(const Matrix& x, const Labels& y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw Error("classifier: row/label count mismatch");
  const std::size_t pos = count_positive(y);
  if (pos == 0 || pos == y.size()) throw Error("classifier: training labels contain a single class");
}

void check_dim(std::size_t got, std::size_t want) {
  if (got != want) {
    throw Error("classifier: expected " + std::to_string(want) + " features, got " + std::to_string(got));
  }
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  Eigen::Index r = 0, c = 0;
  if (!(in >> r >> c) || r < 0 || c < 0) throw Error("model file: bad matrix header");
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      if (!(in >> m(i, j))) throw Error("model file: truncated matrix");
    }
  }
  return m;
}

void expect_token(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) throw Error("model file: expected '" + token + "', got '" + got + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// KNN

KnnClassifier KnnClassifier::fit(const Matrix& x, const Labels& y, std::size_t k) {
  check_training_set(x, y);
  if (k < 1) throw Error("knn: k must be >= 1");
  KnnClassifier m;
  m.x_ = x;
  m.y_ = y;
  m.k_ = std::min(k, y.size());
  return m;
}

double KnnClassifier::score(std::span<const double> x) const {
  check_dim(x.size(), static_cast<std::size_t>(x_.cols()));
  const auto n = static_cast<std::size_t>(x_.rows());
  std::vector<std::pair<double, std::size_t>> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = row_of(x_, static_cast<Eigen::Index>(i));
    double ss = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double t = x[j] - r[j];
      ss += t * t;
    }
    d[i] = {ss, i};
  }
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k_), d.end());
  std::size_t positives = 0;
  for (std::size_t m = 0; m < k_; ++m) positives += y_[d[m].second] != 0;
  return static_cast<double>(positives) / static_cast<double>(k_);
}

void KnnClassifier::write(std::ostream& out) const {
  out << "k " << k_ << '\n';
  write_matrix(out, x_);
  out << "labels";
  for (int v : y_) out << ' ' << v;
  out << '\n';
}

KnnClassifier KnnClassifier::read(std::istream& in) {
  KnnClassifier m;
  expect_token(in, "k");
  if (!(in >> m.k_) || m.k_ < 1) throw Error("model file: bad knn k");
  m.x_ = read_matrix(in);
  expect_token(in, "labels");
  m.y_.resize(static_cast<std::size_t>(m.x_.rows()));
  for (int& v : m.y_) {
    if (!(in >> v)) throw Error("model file: truncated knn labels");
  }
  return m;
}

// ---------------------------------------------------------------------------
// Random forest

class TreeBuilder {
 public:
  // Columns of x are presorted once; every tree reuses the orders.
  TreeBuilder(const Eigen::MatrixXd& x, const Labels& y, std::size_t min_leaf, std::mt19937_64& rng)
      : x_(x), y_(y), min_leaf_(static_cast<double>(min_leaf)), rng_(rng) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto p = static_cast<std::size_t>(x.cols());
    mtry_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))));
    features_.resize(p);
    std::iota(features_.begin(), features_.end(), 0);
    sorted_.resize(p);
    for (std::size_t f = 0; f < p; ++f) {
      const double* col = x.col(static_cast<Eigen::Index>(f)).data();
      sorted_[f].resize(n);
      std::iota(sorted_[f].begin(), sorted_[f].end(), 0);
      std::stable_sort(sorted_[f].begin(), sorted_[f].end(),
                       [col](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    }
    mark_.assign(n, 0);
  }

  // weights[i] = bootstrap multiplicity of row i (0 = out of bag).
  RandomForest::Tree build(const std::vector<int>& weights) {
    weights_ = &weights;
    tree_.clear();
    rows_.clear();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] > 0) rows_.push_back(i);
    }
    grow(0, rows_.size());
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
  };

  double weight(std::size_t row) const { return static_cast<double>((*weights_)[row]); }

  int grow(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(tree_.size());
    tree_.push_back({});
    double total = 0.0;
    double pos = 0.0;
    for (std::size_t r = begin; r < end; ++r) {
      total += weight(rows_[r]);
      if (y_[rows_[r]]) pos += weight(rows_[r]);
    }
    tree_[static_cast<std::size_t>(id)].positive_fraction = pos / total;
    if (pos == 0.0 || pos == total || total < 2.0 * min_leaf_) return id;

    const Split best = find_split(begin, end, pos, total);
    if (best.feature < 0) return id;

    auto mid_it = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                 rows_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
                                   return x_(static_cast<Eigen::Index>(r), best.feature) <= best.threshold;
                                 });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());
    tree_[static_cast<std::size_t>(id)].feature = best.feature;
    tree_[static_cast<std::size_t>(id)].threshold = best.threshold;
    const int left = grow(begin, mid);
    const int right = grow(mid, end);
    tree_[static_cast<std::size_t>(id)].left = left;
    tree_[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  // Node rows of feature f in ascending value order, by a filtered scan of
  // the presorted column for large nodes or a local sort for small ones.
  void ordered_rows(std::size_t f, std::size_t begin, std::size_t end) {
    const std::size_t m = end - begin;
    const std::size_t n = sorted_[f].size();
    order_.clear();
    const double log_m = std::log2(static_cast<double>(m) + 1.0);
    if (static_cast<double>(m) * log_m > static_cast<double>(n)) {
      for (std::size_t row : sorted_[f]) {
        if (mark_[row] == stamp_) order_.push_back(row);
      }
    } else {
      order_.assign(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                    rows_.begin() + static_cast<std::ptrdiff_t>(end));
      const double* col = x_.col(static_cast<Eigen::Index>(f)).data();
      std::sort(order_.begin(), order_.end(), [col](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    }
  }

  // Weighted Gini of the children, minimized over mtry random features; keeps
  // drawing features past mtry until some valid split exists.
  Split find_split(std::size_t begin, std::size_t end, double pos_total, double total) {
    ++stamp_;
    for (std::size_t r = begin; r < end; ++r) mark_[rows_[r]] = stamp_;
    const double parent = gini(pos_total, total) * total;
    Split best;
    const std::size_t p = features_.size();
    for (std::size_t m = 0; m < p; ++m) {
      std::uniform_int_distribution<std::size_t> pick(m, p - 1);
      std::swap(features_[m], features_[pick(rng_)]);
      const std::size_t f = features_[m];
      const double* col = x_.col(static_cast<Eigen::Index>(f)).data();
      ordered_rows(f, begin, end);
      double left_pos = 0.0;
      double left_n = 0.0;
      for (std::size_t k = 0; k + 1 < order_.size(); ++k) {
        const std::size_t row = order_[k];
        const double w = weight(row);
        left_n += w;
        if (y_[row]) left_pos += w;
        const double v = col[row];
        const double next = col[order_[k + 1]];
        if (v == next) continue;
        if (left_n < min_leaf_ || total - left_n < min_leaf_) continue;
        const double impurity =
            gini(left_pos, left_n) * left_n + gini(pos_total - left_pos, total - left_n) * (total - left_n);
        if (impurity < best.impurity - 1e-12) {
          best.impurity = impurity;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (v + next);
          // Midpoint can round onto the upper value for adjacent doubles.
          if (!(best.threshold < next)) best.threshold = v;
        }
      }
      if (m + 1 >= mtry_ && best.feature >= 0) break;
    }
    if (best.feature >= 0 && !(best.impurity < parent - 1e-12)) best.feature = -1;
    return best;
  }

  static double gini(double pos, double n) {
    const double p = pos / n;
    return 2.0 * p * (1.0 - p);
  }

  const Eigen::MatrixXd& x_;
  const Labels& y_;
  double min_leaf_;
  std::mt19937_64& rng_;
  std::size_t mtry_ = 1;
  std::vector<std::size_t> features_;
  std::vector<std::vector<std::size_t>> sorted_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  const std::vector<int>* weights_ = nullptr;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> order_;
  RandomForest::Tree tree_;
};

RandomForest RandomForest::fit(const Matrix& x, const Labels& y, std::size_t n_trees, std::size_t min_leaf,
                               std::uint64_t seed, const std::vector<int>* groups) {
  check_training_set(x, y);
  if (n_trees < 1) throw Error("rf: n_trees must be >= 1");
  const auto n = static_cast<std::size_t>(x.rows());
  if (groups && groups->size() != n) throw Error("rf: group count mismatch");

  // Bagging units: a group's rows, or single rows.
  std::vector<std::vector<std::size_t>> units;
  if (groups) {
    std::vector<int> ids(groups->begin(), groups->end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    units.resize(ids.size());
    for (std::size_t i = 0; i < n; ++i) {
      auto it = std::lower_bound(ids.begin(), ids.end(), (*groups)[i]);
      units[static_cast<std::size_t>(it - ids.begin())].push_back(i);
    }
  } else {
    units.resize(n);
    for (std::size_t i = 0; i < n; ++i) units[i] = {i};
  }

  RandomForest forest;
  forest.dim_ = static_cast<std::size_t>(x.cols());
  const Eigen::MatrixXd xc = x;
  std::mt19937_64 rng(seed);
  TreeBuilder builder(xc, y, min_leaf, rng);
  std::vector<double> oob_votes(n, 0.0);
  std::vector<double> oob_count(n, 0.0);
  std::vector<int> unit_count(units.size());
  std::vector<int> weights(n);
  std::uniform_int_distribution<std::size_t> draw(0, units.size() - 1);

  forest.trees_.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    std::fill(unit_count.begin(), unit_count.end(), 0);
    for (std::size_t u = 0; u < units.size(); ++u) ++unit_count[draw(rng)];
    for (std::size_t u = 0; u < units.size(); ++u) {
      for (std::size_t i : units[u]) weights[i] = unit_count[u];
    }
    // A bag with one class cannot be split; it still votes its class.
    forest.trees_.push_back(builder.build(weights));
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i] > 0) continue;
      oob_votes[i] += vote(forest.trees_.back(), row_of(x, static_cast<Eigen::Index>(i)));
      oob_count[i] += 1.0;
    }
  }
  forest.oob_scores_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    forest.oob_scores_[i] = oob_count[i] > 0 ? oob_votes[i] / oob_count[i] : std::numeric_limits<double>::quiet_NaN();
  }
  return forest;
}

int RandomForest::vote(const Tree& tree, std::span<const double> x) {
  int node = 0;
  while (tree[static_cast<std::size_t>(node)].feature >= 0) {
    const Node& nd = tree[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
  return tree[static_cast<std::size_t>(node)].positive_fraction > 0.5 ? 1 : 0;
}

double RandomForest::score(std::span<const double> x) const {
  check_dim(x.size(), dim_);
  int votes = 0;
  for (const auto& tree : trees_) votes += vote(tree, x);
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

void RandomForest::write(std::ostream& out) const {
  out << "dim " << dim_ << " trees " << trees_.size() << '\n';
  for (const auto& tree : trees_) {
    out << "tree " << tree.size() << '\n';
    for (const auto& nd : tree) {
      out << nd.feature << ' ' << format_double(nd.threshold) << ' ' << nd.left << ' ' << nd.right << ' '
          << format_double(nd.positive_fraction) << '\n';
    }
  }
}

RandomForest RandomForest::read(std::istream& in) {
  RandomForest f;
  std::size_t n_trees = 0;
  expect_token(in, "dim");
  if (!(in >> f.dim_)) throw Error("model file: bad rf dim");
  expect_token(in, "trees");
  if (!(in >> n_trees) || n_trees < 1) throw Error("model file: bad rf tree count");
  f.trees_.resize(n_trees);
  for (auto& tree : f.trees_) {
    std::size_t nodes = 0;
    expect_token(in, "tree");
    if (!(in >> nodes) || nodes < 1) throw Error("model file: bad tree size");
    tree.resize(nodes);
    for (auto& nd : tree) {
      if (!(in >> nd.feature >> nd.threshold >> nd.left >> nd.right >> nd.positive_fraction)) {
        throw Error("model file: truncated tree");
      }
      const auto limit = static_cast<int>(nodes);
      if (nd.feature >= static_cast<int>(f.dim_) || nd.left >= limit || nd.right >= limit ||
          (nd.feature >= 0 && (nd.left < 0 || nd.right < 0))) {
        throw Error("model file: corrupt tree node");
      }
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Linear SVM

namespace {

double svm_objective(const Matrix& x, const Vector& yv, const Vector& cost, const Vector& w, double b, double lambda) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double m = yv[i] * (x.row(i).dot(w) + b);
    if (m < 1.0) loss += cost[i] * (1.0 - m);
  }
  return 0.5 * lambda * (w.squaredNorm() + b * b) + loss / static_cast<double>(x.rows());
}

}  // namespace

LinearSvm LinearSvm::fit(const Matrix& x, const Labels& y, double c, std::size_t epochs, std::uint64_t seed) {
  check_training_set(x, y);
  if (!(c > 0.0)) throw Error("svm: C must be > 0");
  const auto n = static_cast<std::size_t>(x.rows());
  const Eigen::Index p = x.cols();
  const double lambda = 1.0 / c;
  const auto n_pos = static_cast<double>(count_positive(y));
  const double n_neg = static_cast<double>(n) - n_pos;

  Vector yv(static_cast<Eigen::Index>(n)), cost(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    yv[ii] = y[i] ? 1.0 : -1.0;
    cost[ii] = static_cast<double>(n) / (2.0 * (y[i] ? n_pos : n_neg));
  }
  const double radius = std::sqrt(cost.maxCoeff() / lambda);

  // w = scale * v keeps the per-step shrink O(1); |v|^2 is tracked incrementally.
  const auto pz = static_cast<std::size_t>(p);
  std::vector<double> v(pz, 0.0), w_sum(pz, 0.0), row_sq(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) row_sq[i] = x.row(static_cast<Eigen::Index>(i)).squaredNorm();
  double scale = 1.0;
  double v_sq = 0.0;
  double b = 0.0;
  double b_sum = 0.0;
  double count = 0.0;

  LinearSvm best;
  best.w_ = Vector::Zero(p);
  best.b_ = 0.0;
  double best_objective = svm_objective(x, yv, cost, best.w_, 0.0, lambda);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto ii = static_cast<Eigen::Index>(i);
      const double* xi = x.data() + ii * p;
      double dot = 0.0;
      for (std::size_t j = 0; j < pz; ++j) dot += v[j] * xi[j];
      const double m = yv[ii] * (scale * dot + b);
      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
        v_sq = 0.0;
        dot = 0.0;
        b = 0.0;
      } else {
        scale *= shrink;
        b *= shrink;
      }
      if (m < 1.0) {
        const double step = eta * cost[ii] * yv[ii];
        const double a = step / scale;
        for (std::size_t j = 0; j < pz; ++j) v[j] += a * xi[j];
        v_sq += 2.0 * a * dot + a * a * row_sq[i];
        b += step;
      }
      const double norm = std::sqrt(std::max(0.0, scale * scale * v_sq + b * b));
      if (norm > radius) {
        scale *= radius / norm;
        b *= radius / norm;
      }
      if (scale < 1e-100) {
        for (double& vj : v) vj *= scale;
        v_sq *= scale * scale;
        scale = 1.0;
      }
      for (std::size_t j = 0; j < pz; ++j) w_sum[j] += scale * v[j];
      b_sum += b;
      count += 1.0;
    }
    Vector w_avg(p);
    for (std::size_t j = 0; j < pz; ++j) w_avg[static_cast<Eigen::Index>(j)] = w_sum[j] / count;
    const double b_avg = b_sum / count;
    const double obj = svm_objective(x, yv, cost, w_avg, b_avg, lambda);
    if (obj < best_objective) {
      best_objective = obj;
      best.w_ = std::move(w_avg);
      best.b_ = b_avg;
    }
    best.history_.push_back(best_objective);
  }
  return best;
}

double LinearSvm::margin(std::span<const double> x) const {
  check_dim(x.size(), static_cast<std::size_t>(w_.size()));
  double m = b_;
  for (std::size_t j = 0; j < x.size(); ++j) m += w_[static_cast<Eigen::Index>(j)] * x[j];
  return m;
}

double LinearSvm::score(std::span<const double> x) const {
  const double m = margin(x);
  if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

void LinearSvm::write(std::ostream& out) const {
  out << "weights " << w_.size();
  for (Eigen::Index j = 0; j < w_.size(); ++j) out << ' ' << format_double(w_[j]);
  out << "\nbias " << format_double(b_) << '\n';
}

LinearSvm LinearSvm::read(std::istream& in) {
  LinearSvm m;
  Eigen::Index p = 0;
  expect_token(in, "weights");
  if (!(in >> p) || p < 0) throw Error("model file: bad svm weight count");
  m.w_.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(in >> m.w_[j])) throw Error("model file: truncated svm weights");
  }
  expect_token(in, "bias");
  if (!(in >> m.b_)) throw Error("model file: bad svm bias");
  return m;
}

// ---------------------------------------------------------------------------

Classifier Classifier::fit(const ClassifierConfig& config, const Matrix& x, const Labels& y, std::uint64_t seed,
                           const std::vector<int>* groups) {
  config.validate();
  Classifier c;
  c.config_ = config;
  switch (config.algorithm) {
    case ClassifierAlgorithm::Knn:
      c.impl_ = KnnClassifier::fit(x, y, config.k);
      break;
    case ClassifierAlgorithm::RandomForest:
      c.impl_ = RandomForest::fit(x, y, config.n_trees, config.min_leaf, seed, groups);
      break;
    case ClassifierAlgorithm::LinearSvm:
      c.impl_ = LinearSvm::fit(x, y, config.c, config.epochs, seed);
      break;
  }
  return c;
}

double Classifier::score(std::span<const double> x) const {
  return std::visit([&](const auto& m) { return m.score(x); }, impl_);
}

void Classifier::write(std::ostream& out) const {
  std::visit([&](const auto& m) { m.write(out); }, impl_);
}

Classifier Classifier::read(std::istream& in, const ClassifierConfig& config) {
  Classifier c;
  c.config_ = config;
  switch (config.algorithm) {
    case ClassifierAlgorithm::Knn: c.impl_ = KnnClassifier::read(in); break;
    case ClassifierAlgorithm::RandomForest: c.impl_ = RandomForest::read(in); break;
    case ClassifierAlgorithm::LinearSvm: c.impl_ = LinearSvm::read(in); break;
  }
  return c;
}

// ---------------------------------------------------------------------------

SurrogateModel::SurrogateModel(std::vector<std::string> input_names, std::vector<std::size_t> features,
                               StandardScaler scaler, Classifier classifier)
    : input_names_(std::move(input_names)),
      features_(std::move(features)),
      scaler_(std::move(scaler)),
      classifier_(std::move(classifier)) {
  if (scaler_.dim() != features_.size()) throw Error("surrogate: scaler/feature count mismatch");
  for (std::size_t f : features_) {
    if (f >= input_names_.size()) throw Error("surrogate: selected feature out of range");
  }
}

double SurrogateModel::score(std::span<const double> x) const {
  if (x.size() != input_names_.size()) {
    throw Error("surrogate: expected " + std::to_string(input_names_.size()) + " features, got " +
                std::to_string(x.size()));
  }
  // An empty explanation carries no information.
  if (features_.empty()) return 0.5;
  std::vector<double> picked(features_.size());
  for (std::size_t m = 0; m < features_.size(); ++m) picked[m] = x[features_[m]];
  std::vector<double> scaled(features_.size());
  scaler_.transform_row(picked, scaled);
  return classifier_.score(scaled);
}

std::vector<double> SurrogateModel::score_all(const Matrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = score(row_of(x, i));
  return out;
}

Labels SurrogateModel::predict_all(const Matrix& x) const {
  Labels out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = predict(row_of(x, i));
  return out;
}

std::vector<std::string> SurrogateModel::feature_names() const {
  std::vector<std::string> out;
  for (std::size_t f : features_) out.push_back(input_names_[f]);
  return out;
}

SurrogateModel SurrogateModel::with_input_scaler(const StandardScaler& outer) const {
  if (outer.dim() != input_names_.size()) throw Error("surrogate: outer scaler dimension mismatch");
  return SurrogateModel(input_names_, features_, scaler_.after(outer.select(features_)), classifier_);
}

}  // namespace proteus
