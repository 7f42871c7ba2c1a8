#include "proteus/oversampler.hpp"

#include <random>

namespace proteus {

Matrix AugmentedDataset::all_rows() const {
  Matrix out(static_cast<Eigen::Index>(size()), original.cols());
  if (n_original()) out.topRows(original.rows()) = original;
  if (n_pseudo()) out.bottomRows(pseudo_rows.rows()) = pseudo_rows;
  return out;
}

Labels AugmentedDataset::all_labels() const {
  Labels out = original_labels;
  out.resize(size(), 1);
  return out;
}

std::vector<int> AugmentedDataset::group_ids() const {
  std::vector<int> out(size());
  for (std::size_t i = 0; i < n_original(); ++i) out[i] = static_cast<int>(i);
  for (std::size_t p = 0; p < n_pseudo(); ++p) out[n_original() + p] = static_cast<int>(pseudo_parent[p]);
  return out;
}

Matrix AugmentedDataset::rows(std::span<const std::size_t> indices) const {
  Matrix out(static_cast<Eigen::Index>(indices.size()), original.cols());
  const std::size_t n = n_original();
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (i < n) {
      out.row(static_cast<Eigen::Index>(k)) = original.row(static_cast<Eigen::Index>(i));
    } else {
      out.row(static_cast<Eigen::Index>(k)) = pseudo_rows.row(static_cast<Eigen::Index>(i - n));
    }
  }
  return out;
}

AugmentedDataset oversample(const Matrix& x, const Labels& labels, const AnomalyOracle& oracle,
                            const OversampleParams& params) {
  if (labels.size() != static_cast<std::size_t>(x.rows())) throw Error("oversample: label count mismatch");
  if (!(params.sigma > 0.0)) throw Error("oversample: sigma must be positive");

  AugmentedDataset out;
  out.original = x;
  out.original_labels = labels;

  std::vector<std::size_t> anomalies;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) anomalies.push_back(i);
  }
  if (anomalies.empty()) throw Error("oversample: no detector-flagged anomaly");
  out.fill.anomalies = anomalies.size();
  out.fill.requested = anomalies.size() * params.ps;
  out.pseudo_rows.resize(0, x.cols());
  if (params.ps == 0) return out;

  const auto d = static_cast<std::size_t>(x.cols());
  std::vector<double> buffer;
  std::vector<double> candidate(d);
  std::normal_distribution<double> noise(0.0, params.sigma);
  const std::size_t budget = params.ps * params.max_attempts_per_pseudo;

  for (std::size_t a : anomalies) {
    std::mt19937_64 rng(derive_seed(params.seed, {a}));
    auto parent = row_of(x, static_cast<Eigen::Index>(a));
    std::size_t accepted = 0;
    std::size_t draws = 0;
    while (accepted < params.ps && draws < budget) {
      for (std::size_t j = 0; j < d; ++j) candidate[j] = parent[j] + noise(rng);
      ++draws;
      if (oracle(candidate)) {
        buffer.insert(buffer.end(), candidate.begin(), candidate.end());
        out.pseudo_parent.push_back(a);
        ++accepted;
      }
    }
    out.fill.accepted += accepted;
    out.fill.draws += draws;
    if (accepted < params.ps) ++out.fill.underfilled_anomalies;
  }

  out.pseudo_rows = Eigen::Map<const Matrix>(buffer.data(), static_cast<Eigen::Index>(out.pseudo_parent.size()),
                                             static_cast<Eigen::Index>(d));
  return out;
}

AugmentedDataset oversample(const Matrix& x, const Labels& labels, const DetectorModel& detector,
                            const OversampleParams& params) {
  return oversample(x, labels, [&](std::span<const double> row) { return detector.is_anomaly(row); }, params);
}

}  // namespace proteus
