#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "proteus/common.hpp"
#include "proteus/detectors.hpp"

namespace proteus {

struct OversampleParams {
  std::size_t ps = 0;  // pseudo-samples per anomaly
  double sigma = 0.1;
  std::size_t max_attempts_per_pseudo = 50;
  std::uint64_t seed = 0;
};

// Answers "is this row an anomaly?" for a candidate pseudo-sample.
using AnomalyOracle = std::function<bool(std::span<const double>)>;

struct FillRate {
  std::size_t anomalies = 0;
  std::size_t requested = 0;  // anomalies * ps
  std::size_t accepted = 0;
  std::size_t draws = 0;
  std::size_t underfilled_anomalies = 0;

  double acceptance_rate() const { return draws ? static_cast<double>(accepted) / static_cast<double>(draws) : 0.0; }
  double fill_ratio() const { return requested ? static_cast<double>(accepted) / static_cast<double>(requested) : 1.0; }
};

/// Original rows plus detector-approved pseudo-samples.
///
/// Rows [0, n_original) are the input rows; pseudo row p sits at
/// n_original + p. Every row carries a group id: originals use their own
/// index, pseudo rows inherit the id of their parent anomaly.
struct AugmentedDataset {
  Matrix original;
  Labels original_labels;
  Matrix pseudo_rows;
  std::vector<std::size_t> pseudo_parent;
  FillRate fill;

  std::size_t n_original() const { return static_cast<std::size_t>(original.rows()); }
  std::size_t n_pseudo() const { return static_cast<std::size_t>(pseudo_rows.rows()); }
  std::size_t size() const { return n_original() + n_pseudo(); }

  Matrix all_rows() const;
  Labels all_labels() const;
  std::vector<int> group_ids() const;
  // Copies the rows with the given augmented indices.
  Matrix rows(std::span<const std::size_t> indices) const;
  int label(std::size_t index) const { return index < n_original() ? original_labels[index] : 1; }
};

// For each labeled anomaly a, draws a + N(0, sigma^2 I) until `ps` draws are
// accepted by the oracle or ps * max_attempts_per_pseudo draws were spent.
// Each anomaly uses its own derived seed.
AugmentedDataset oversample(const Matrix& x, const Labels& labels, const AnomalyOracle& oracle,
                            const OversampleParams& params);

AugmentedDataset oversample(const Matrix& x, const Labels& labels, const DetectorModel& detector,
                            const OversampleParams& params);

}  // namespace proteus
