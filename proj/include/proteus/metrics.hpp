#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proteus/common.hpp"

namespace proteus {

// Probability that a random positive outscores a random negative, ties
// counted as 1/2. Rank-based, O(n log n). Throws on a single class.
double auc(std::span<const double> scores, std::span<const int> labels);

// AUC with integer row multiplicities (a bootstrap sample). `order` must sort
// `scores` ascending. Returns nullopt when either class has zero weight.
std::optional<double> weighted_auc(std::span<const double> scores, std::span<const int> labels,
                                   std::span<const std::size_t> order, std::span<const int> weights);

struct FeaturePr {
  double precision = 0.0;
  double recall = 0.0;
  // Set when the explanation is empty; precision is then reported as 0.
  bool precision_undefined = false;
};

FeaturePr feature_pr(std::span<const std::size_t> gold, std::span<const std::size_t> explanation);

struct ConflictSets {
  std::vector<std::size_t> anc;  // detector 1, surrogate 0
  std::vector<std::size_t> nac;  // detector 0, surrogate 1
};

ConflictSets conflicts(std::span<const int> detector_labels, std::span<const int> surrogate_labels);

struct DiscoveryRates {
  std::optional<double> tnd;  // empty when ANC is empty
  std::optional<double> tad;  // empty when NAC is empty
};

DiscoveryRates discovery_rates(const ConflictSets& sets, std::span<const int> gold_labels);

enum class BiasVariant { BbcGroup, CvGroup, BbcNoGroup, CvNoGroup };

inline constexpr BiasVariant kBiasVariants[] = {BiasVariant::BbcGroup, BiasVariant::CvGroup,
                                                BiasVariant::BbcNoGroup, BiasVariant::CvNoGroup};

std::string to_string(BiasVariant v);

struct BiasRecord {
  double train_estimate = 0.0;
  double test_auc = 0.0;
  BiasVariant variant = BiasVariant::BbcGroup;
};

struct BiasSummary {
  BiasVariant variant = BiasVariant::BbcGroup;
  std::size_t count = 0;
  double rss = 0.0;
  double mean_bias = 0.0;  // mean(train_estimate - test_auc)
};

// One entry per variant, in kBiasVariants order. Throws when a variant has no record.
std::vector<BiasSummary> bias_summary(std::span<const BiasRecord> records);

}  // namespace proteus
