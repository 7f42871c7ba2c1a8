#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proteus/classifiers.hpp"
#include "proteus/common.hpp"
#include "proteus/feature_selection.hpp"
#include "proteus/oversampler.hpp"

namespace proteus {

struct CvProtocol {
  std::size_t k = 10;
  std::size_t r = 5;
  std::uint64_t seed = 0;
  // When false, pseudo-samples are dealt to folds independently of their
  // parent anomaly (leaky; only useful to measure the leak).
  bool grouping = true;

  void validate() const;
};

/// One point of the search space: selector, classifier, pseudo-samples per anomaly.
struct Configuration {
  SelectorConfig selector;
  ClassifierConfig classifier;
  std::size_t ps = 0;

  std::string id() const;
};

// Full cartesian product, ordered ps-major, then selector, then classifier.
std::vector<Configuration> make_grid(const std::vector<SelectorConfig>& selectors,
                                     const std::vector<ClassifierConfig>& classifiers,
                                     const std::vector<std::size_t>& ps_values);

std::vector<SelectorConfig> default_selectors();
std::vector<ClassifierConfig> default_classifiers();
inline const std::vector<std::size_t> kDefaultPs = {0, 3, 10};

// 9 selectors x 8 classifiers x 3 ps values = 216 configurations.
std::vector<Configuration> default_grid();

// fold[r][i] is the test fold of row i in repeat r.
using FoldAssignment = std::vector<std::vector<int>>;

// Group-atomic stratified folds. A group is positive when any member is.
// Groups of each class are shuffled and dealt round-robin, the negative class
// continuing where the positive class stopped. Throws when a class has fewer
// than k groups.
FoldAssignment make_folds(std::span<const int> labels, std::span<const int> groups, const CvProtocol& protocol);

struct GridOptions {
  CvProtocol protocol;
  double sigma = 0.1;
  std::size_t max_attempts_per_pseudo = 50;
  int jobs = 1;
};

struct OversampledSet {
  std::size_t ps = 0;
  AugmentedDataset data;
  // folds[r][i] over the augmented rows of `data`
  FoldAssignment folds;
};

struct GridResult {
  std::vector<Configuration> configs;
  // One n_original x n_configs matrix per repeat of out-of-fold scores.
  std::vector<Eigen::MatrixXd> predictions;
  // How many times each (row, config) cell was written, summed over repeats.
  Eigen::MatrixXi score_counts;
  std::vector<double> mean_auc;
  std::vector<double> mean_subset_size;
  std::vector<OversampledSet> oversampled;
  std::size_t folds = 0;

  const OversampledSet& set_for(std::size_t ps) const;
};

// z: standardized training rows; labels: detector labels of those rows;
// oracle: the detector as seen in z's coordinates.
GridResult evaluate_grid(const Matrix& z, const Labels& labels, const AnomalyOracle& oracle,
                         const std::vector<Configuration>& configs, const GridOptions& options);

// Index of the configuration with the highest mean CV AUC; ties go to the
// smaller mean |S|, then to the lexicographically smaller id.
std::size_t select_winner(const GridResult& result);

struct BbcResult {
  double estimate = 0.0;
  std::vector<double> per_repeat;
  std::size_t redraws = 0;
};

// Bootstrap bias correction over pooled out-of-fold scores. `groups` may be
// empty (each row is its own group). The per-repeat estimate is the mean
// out-of-bag AUC of the in-bag winner over `bootstraps` valid draws.
BbcResult bbc_correct(const std::vector<Eigen::MatrixXd>& predictions, std::span<const int> labels,
                      std::span<const int> groups, std::size_t bootstraps, std::uint64_t seed, int jobs = 1);

struct ConfigScore {
  std::string id;
  std::size_t ps = 0;
  double cv_auc = 0.0;
  double mean_subset_size = 0.0;
};

struct ExplainOptions {
  GridOptions grid;
  std::size_t bootstraps = 500;
  // Lower k to the number of anomalies when there are too few of them.
  bool cap_folds = true;
};

struct ExplanationReport {
  Configuration best;
  std::size_t best_index = 0;
  std::vector<std::size_t> selected;
  std::vector<std::string> selected_names;
  double bbc_auc = 0.0;
  double cv_auc = 0.0;
  std::vector<ConfigScore> table;
  // Operates on the standardized rows passed to explain().
  std::optional<SurrogateModel> surrogate;
  std::vector<std::pair<std::size_t, FillRate>> fill_rates;
  std::size_t folds = 0;
  std::size_t repeats = 0;
  std::size_t n_train = 0;
  std::size_t n_anomalies = 0;
  double seconds_grid = 0.0;
  double seconds_bbc = 0.0;
  double seconds_final = 0.0;
};

// Grid search, BBC and the final refit on all rows at the winner's ps.
ExplanationReport explain(const Matrix& z, const std::vector<std::string>& names, const Labels& labels,
                          const AnomalyOracle& oracle, const std::vector<Configuration>& configs,
                          const ExplainOptions& options);

// Final refit alone: scaler over the augmented rows, selection, classifier.
SurrogateModel fit_surrogate(const AugmentedDataset& data, const std::vector<std::string>& names,
                             const Configuration& config, std::uint64_t seed, bool grouping = true);

}  // namespace proteus
