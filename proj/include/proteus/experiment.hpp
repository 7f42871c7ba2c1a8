#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "proteus/automl.hpp"
#include "proteus/dataset.hpp"
#include "proteus/detectors.hpp"
#include "proteus/metrics.hpp"

namespace proteus {

/// One run on the regenerated benchmark: split the parent 70/30, fit the
/// detector on the training part of the parent features, dilute with
/// irrelevant features, explain the training part and test on the rest.
struct SyntheticRunOptions {
  std::size_t dims = 20;
  DetectorParams detector;
  double train_fraction = 0.7;
  double anomaly_ratio = static_cast<double>(kHicsAnomalies) / static_cast<double>(kHicsSamples);
  std::vector<Configuration> grid = default_grid();
  ExplainOptions explain;
  std::uint64_t seed = 0;
};

struct SyntheticRunResult {
  ExplanationReport report;
  // Empty when the detector flags no test row (or every test row).
  std::optional<double> test_auc;
  FeaturePr feature_pr;
  std::size_t train_flagged = 0;
  std::size_t test_flagged = 0;
  ConflictSets test_conflicts;
  DiscoveryRates test_rates;
};

SyntheticRunResult run_synthetic(const SyntheticRunOptions& options);

// Grouped and ungrouped explanations of the same run; one record per
// variant. Empty when the test split has a single detector class.
std::vector<BiasRecord> run_bias_trial(const SyntheticRunOptions& options);

}  // namespace proteus
