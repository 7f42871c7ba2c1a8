#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "proteus/common.hpp"
#include "proteus/dataset.hpp"

namespace proteus {

enum class ClassifierAlgorithm { Knn, RandomForest, LinearSvm };

std::string to_string(ClassifierAlgorithm a);

struct ClassifierConfig {
  ClassifierAlgorithm algorithm = ClassifierAlgorithm::Knn;
  std::size_t k = 5;             // KNN
  std::size_t n_trees = 100;     // RF
  std::size_t min_leaf = 1;      // RF
  double c = 1.0;                // SVM, inverse regularization strength
  std::size_t epochs = 200;      // SVM

  std::string id() const;
  void validate() const;
};

/// k nearest neighbors, Euclidean, neighbor ties broken by training index.
class KnnClassifier {
 public:
  static KnnClassifier fit(const Matrix& x, const Labels& y, std::size_t k);
  // Fraction of anomalous rows among the k nearest.
  double score(std::span<const double> x) const;

  void write(std::ostream& out) const;
  static KnnClassifier read(std::istream& in);

 private:
  Matrix x_;
  Labels y_;
  std::size_t k_ = 1;
};

/// Bagged CART trees (Gini, sqrt(p) features per split). Trees vote with the
/// majority class of their leaf.
class RandomForest {
 public:
  // When `groups` is given, bagging draws whole groups so that rows sharing a
  // group are in-bag or out-of-bag together.
  static RandomForest fit(const Matrix& x, const Labels& y, std::size_t n_trees, std::size_t min_leaf,
                          std::uint64_t seed, const std::vector<int>* groups = nullptr);

  // Fraction of trees voting "anomaly".
  double score(std::span<const double> x) const;

  // Out-of-bag vote fraction per training row (NaN for rows never out of bag).
  const std::vector<double>& oob_scores() const { return oob_scores_; }
  std::size_t tree_count() const { return trees_.size(); }

  void write(std::ostream& out) const;
  static RandomForest read(std::istream& in);

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double positive_fraction = 0.0;
  };
  using Tree = std::vector<Node>;
  static int vote(const Tree& tree, std::span<const double> x);

  std::vector<Tree> trees_;
  std::size_t dim_ = 0;
  std::vector<double> oob_scores_;

  friend class TreeBuilder;
};

/// Linear max-margin classifier trained by stochastic subgradient descent on
/// the class-balanced, L2-regularized hinge loss
///   (1/(2C)) ||w||^2 + mean_i c_i max(0, 1 - y_i (w.x_i + b)),
/// with step size C/t and the bias as an extra constant input.
class LinearSvm {
 public:
  static LinearSvm fit(const Matrix& x, const Labels& y, double c, std::size_t epochs, std::uint64_t seed);

  double margin(std::span<const double> x) const;
  // Logistic squashing of the margin.
  double score(std::span<const double> x) const;

  const Vector& weights() const { return w_; }
  double bias() const { return b_; }
  // Objective of the kept (best averaged) iterate after each epoch.
  const std::vector<double>& objective_history() const { return history_; }

  void write(std::ostream& out) const;
  static LinearSvm read(std::istream& in);

 private:
  Vector w_;
  double b_ = 0.0;
  std::vector<double> history_;
};

/// One fitted classifier of any kind, over already-selected, standardized inputs.
class Classifier {
 public:
  static Classifier fit(const ClassifierConfig& config, const Matrix& x, const Labels& y, std::uint64_t seed,
                        const std::vector<int>* groups = nullptr);

  double score(std::span<const double> x) const;
  const ClassifierConfig& config() const { return config_; }

  void write(std::ostream& out) const;
  static Classifier read(std::istream& in, const ClassifierConfig& config);

  const RandomForest* forest() const { return std::get_if<RandomForest>(&impl_); }
  const LinearSvm* svm() const { return std::get_if<LinearSvm>(&impl_); }

 private:
  ClassifierConfig config_;
  std::variant<KnnClassifier, RandomForest, LinearSvm> impl_;
};

/// The final surrogate: raw full-width row -> standardize -> keep selected
/// features -> classifier score.
class SurrogateModel {
 public:
  SurrogateModel(std::vector<std::string> input_names, std::vector<std::size_t> features, StandardScaler scaler,
                 Classifier classifier);

  // Expects a row with all input_names().size() features.
  double score(std::span<const double> x) const;
  // 1 iff score > 0.5
  int predict(std::span<const double> x) const { return score(x) > 0.5 ? 1 : 0; }

  std::vector<double> score_all(const Matrix& x) const;
  Labels predict_all(const Matrix& x) const;

  const std::vector<std::string>& input_names() const { return input_names_; }
  const std::vector<std::size_t>& features() const { return features_; }
  std::vector<std::string> feature_names() const;
  // Scaler over the selected features only.
  const StandardScaler& scaler() const { return scaler_; }
  const Classifier& classifier() const { return classifier_; }
  const ClassifierConfig& config() const { return classifier_.config(); }

  // Folds an outer standardization into this model so it accepts rows in
  // the outer scaler's raw units.
  SurrogateModel with_input_scaler(const StandardScaler& outer) const;

 private:
  std::vector<std::string> input_names_;
  std::vector<std::size_t> features_;
  StandardScaler scaler_;
  Classifier classifier_;
};

}  // namespace proteus
