#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "proteus/common.hpp"

namespace proteus {

enum class DetectorKind { IsolationForest, Lof, Loda };

std::string to_string(DetectorKind kind);
// Accepts "iforest"/"if", "lof", "loda" (case-insensitive).
DetectorKind parse_detector_kind(const std::string& name);

struct IsolationForestParams {
  std::size_t n_trees = 100;
  std::size_t subsample_size = 256;
  std::uint64_t seed = 0;
};

struct LofParams {
  std::size_t k_neighbors = 15;
};

struct LodaParams {
  std::size_t n_projections = 100;
  std::size_t n_bins = 0;  // 0 selects Sturges' rule, ceil(1 + log2 n)
  std::uint64_t seed = 0;
};

// Average path length of an unsuccessful BST search over n points, the
// normalizer of isolation depths. c(1) = 0 and c(2) = 1 by convention.
double average_path_length(std::size_t n);

class IsolationTree {
 public:
  static IsolationTree grow(const Matrix& x, std::vector<std::size_t> rows, std::size_t depth_limit,
                            std::mt19937_64& rng);

  // Depth of the leaf x falls in, plus c(leaf size) for unresolved leaves.
  double path_length(std::span<const double> x) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
    std::size_t size = 0;
  };
  int build(const Matrix& x, std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
            std::size_t depth, std::size_t depth_limit, std::mt19937_64& rng);

  std::vector<Node> nodes_;
};

class IsolationForest {
 public:
  static IsolationForest fit(const Matrix& x, const IsolationForestParams& params);

  // 2^(-E[h(x)] / c(psi)), in (0, 1).
  double score(std::span<const double> x) const;

  std::size_t dim() const { return dim_; }
  std::size_t subsample_size() const { return psi_; }
  const std::vector<IsolationTree>& trees() const { return trees_; }

 private:
  std::vector<IsolationTree> trees_;
  std::size_t psi_ = 0;
  std::size_t dim_ = 0;
};

/// Local Outlier Factor over a brute-force Euclidean neighbor index.
class LocalOutlierFactor {
 public:
  static constexpr double kDistanceFloor = 1e-12;

  static LocalOutlierFactor fit(const Matrix& x, const LofParams& params);

  // Out-of-sample LOF of x against the training set (x is never its own neighbor).
  double score(std::span<const double> x) const;

  // In-sample LOF of every training row, each excluding itself.
  const std::vector<double>& training_scores() const { return training_scores_; }
  std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }

 private:
  struct Neighbors {
    std::vector<std::size_t> index;
    std::vector<double> distance;
  };
  Neighbors nearest(std::span<const double> x, std::ptrdiff_t exclude) const;
  double local_reachability(const Neighbors& nb) const;

  Matrix data_;
  std::size_t k_ = 0;
  std::vector<double> k_distance_;
  std::vector<double> lrd_;
  std::vector<double> training_scores_;
};

/// Lightweight on-line detector of anomalies: an ensemble of sparse random
/// projections, each with an equi-width histogram.
class Loda {
 public:
  static constexpr double kProbabilityFloor = 1e-12;

  static Loda fit(const Matrix& x, const LodaParams& params);

  // -(1/k) sum_i log p_i(w_i . x)
  double score(std::span<const double> x) const;

  // Per-feature mean -log p over projections using the feature minus the
  // mean over projections not using it. Zero when either side is empty.
  std::vector<double> feature_contributions(std::span<const double> x) const;

  std::size_t dim() const { return dim_; }
  std::size_t projection_count() const { return projections_.size(); }

 private:
  struct Projection {
    std::vector<std::size_t> features;
    std::vector<double> weights;
    double lo = 0.0;
    double width = 0.0;
    std::vector<double> probability;  // per bin, count / n

    double project(std::span<const double> x) const;
    double bin_probability(double v) const;
  };
  std::vector<double> neg_log_probabilities(std::span<const double> x) const;

  std::vector<Projection> projections_;
  std::size_t dim_ = 0;
};

struct DetectorParams {
  DetectorKind kind = DetectorKind::IsolationForest;
  IsolationForestParams iforest;
  LofParams lof;
  LodaParams loda;
};

/// A fitted detector w_A with its binarization threshold T.
///
/// `input_columns`, when non-empty, restricts the detector to those columns of
/// the rows it is given; this lets a detector fitted before irrelevant
/// features were appended label rows of the widened dataset.
class DetectorModel {
 public:
  static DetectorModel fit(const Matrix& x, const DetectorParams& params,
                           std::vector<std::size_t> input_columns = {});

  DetectorKind kind() const;
  double score(std::span<const double> x) const;
  std::vector<double> score_all(const Matrix& x) const;

  // Scores of the fitting data. For LOF these are in-sample factors.
  const std::vector<double>& training_scores() const { return training_scores_; }

  double threshold() const { return threshold_; }
  void set_threshold(double t) { threshold_ = t; }
  bool is_anomaly(std::span<const double> x) const { return score(x) > threshold_; }

  const std::vector<std::size_t>& input_columns() const { return input_columns_; }
  // Dimensionality of the rows passed to score().
  std::size_t input_dim() const { return input_dim_; }

  const Loda* loda() const { return std::get_if<Loda>(&impl_); }

 private:
  std::variant<IsolationForest, LocalOutlierFactor, Loda> impl_;
  std::vector<std::size_t> input_columns_;
  std::size_t input_dim_ = 0;
  std::vector<double> training_scores_;
  double threshold_ = 0.0;
};

struct Binarization {
  double threshold = 0.0;
  Labels labels;
};

// T = (1 - anomaly_ratio) quantile of scores with linear interpolation;
// labels[i] = scores[i] > T.
Binarization binarize(std::span<const double> scores, double anomaly_ratio);

// Mean LODA contribution vector over the given rows.
std::vector<double> mean_loda_contributions(const Loda& model, const Matrix& x,
                                            std::span<const std::size_t> rows);

}  // namespace proteus
