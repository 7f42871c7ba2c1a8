#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proteus/common.hpp"

namespace proteus {

/// An n x d numeric table with feature names and optional side columns.
///
/// `gold_features` holds the known explaining subspace when the dataset is
/// synthetic (empty otherwise). It never affects any fitting code.
struct Dataset {
  Matrix values;
  std::vector<std::string> feature_names;
  std::optional<Labels> gold_labels;
  std::optional<std::vector<int>> group_ids;
  std::vector<std::size_t> gold_features;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

  // Throws Error when any invariant is broken (non-finite cell, duplicate
  // names, side column of the wrong length).
  void validate() const;

  Dataset subset_rows(std::span<const std::size_t> rows) const;
};

/// A dataset plus the labels a detector assigned to it.
struct LabeledDataset {
  Dataset base;
  Labels detector_labels;
  std::vector<double> detector_scores;
  double threshold = 0.0;
};

class StandardScaler {
 public:
  StandardScaler() = default;
  StandardScaler(Vector means, Vector std_devs);

  // Population (1/n) standard deviation; constant columns get std 1.
  static StandardScaler fit(const Matrix& x);

  Matrix transform(const Matrix& x) const;
  void transform_row(std::span<const double> in, std::span<double> out) const;

  // Scaler over a subset of the columns, in the given order.
  StandardScaler select(std::span<const std::size_t> columns) const;

  // The affine map "inner, then this" as a single scaler.
  StandardScaler after(const StandardScaler& inner) const;

  const Vector& means() const { return means_; }
  const Vector& std_devs() const { return std_devs_; }
  std::size_t dim() const { return static_cast<std::size_t>(means_.size()); }

 private:
  Vector means_;
  Vector std_devs_;
};

StandardScaler fit_standardizer(const Dataset& data);
Dataset apply_standardizer(const StandardScaler& scaler, const Dataset& data);

struct CsvOptions {
  std::optional<std::string> label_column;
  std::optional<std::string> group_column;
};

Dataset load_csv(const std::string& path, const CsvOptions& options = {});

// Writes the features followed by the gold label column (when present, under
// `label_column`). Numbers use shortest round-trip formatting.
void write_csv(const std::string& path, const Dataset& data,
               const std::string& label_column = "is_anomaly");

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-class shuffle, first round(fraction * class size) of each class go to
// train. Both index lists come back sorted.
Split stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed);

// Appends n_irrelevant i.i.d. N(0,1) columns named irr_1, irr_2, ...
Dataset generate_synthetic(const Dataset& parent, std::size_t n_irrelevant, std::uint64_t seed);

/// HiCS-style parent benchmark: 867 rows, 5 correlated
/// features split into a 2-d and a 3-d subspace, 10 anomalies placed off the
/// correlation structure of one subspace.
struct HicsParent {
  Dataset dataset;
  std::vector<std::size_t> subspace_2d;
  std::vector<std::size_t> subspace_3d;
  // Per row: -1 for normals, 0 when the anomaly lives in subspace_2d, 1 for subspace_3d.
  std::vector<int> anomaly_subspace;
};

inline constexpr std::size_t kHicsSamples = 867;
inline constexpr std::size_t kHicsAnomalies = 10;

HicsParent make_hics_like_parent(std::uint64_t seed);

}  // namespace proteus
