#include "proteus/experiment.hpp"

#include <numeric>

namespace proteus {

namespace {

struct PreparedRun {
  Matrix z_train;
  Matrix z_test;
  std::vector<std::string> names;
  std::vector<std::size_t> gold_features;
  Labels gold_test;
  DetectorModel detector;
  Labels train_labels;
  Labels test_labels;
};

PreparedRun prepare(const SyntheticRunOptions& options) {
  const HicsParent parent = make_hics_like_parent(derive_seed(options.seed, {1}));
  const std::size_t d0 = parent.dataset.cols();
  if (options.dims < d0) throw Error("synthetic run: dims must be >= " + std::to_string(d0));
  const Dataset full = generate_synthetic(parent.dataset, options.dims - d0, derive_seed(options.seed, {2}));
  const Split split = stratified_split(*full.gold_labels, options.train_fraction, derive_seed(options.seed, {3}));

  PreparedRun run;
  run.names = full.feature_names;
  run.gold_features = full.gold_features;
  const Matrix x_train = take_rows(full.values, split.train);
  const Matrix x_test = take_rows(full.values, split.test);
  const StandardScaler scaler = StandardScaler::fit(x_train);
  run.z_train = scaler.transform(x_train);
  run.z_test = scaler.transform(x_test);
  for (std::size_t i : split.test) run.gold_test.push_back((*full.gold_labels)[i]);

  // The detector sees only the parent features, as before dilution.
  DetectorParams params = options.detector;
  params.iforest.seed = derive_seed(options.seed, {4});
  params.loda.seed = derive_seed(options.seed, {5});
  std::vector<std::size_t> parent_cols(d0);
  std::iota(parent_cols.begin(), parent_cols.end(), 0);
  run.detector = DetectorModel::fit(run.z_train, params, parent_cols);
  const Binarization bin = binarize(run.detector.training_scores(), options.anomaly_ratio);
  run.detector.set_threshold(bin.threshold);
  run.train_labels = bin.labels;
  for (Eigen::Index i = 0; i < run.z_test.rows(); ++i) {
    run.test_labels.push_back(run.detector.is_anomaly(row_of(run.z_test, i)) ? 1 : 0);
  }
  return run;
}

ExplanationReport explain_prepared(const PreparedRun& run, const SyntheticRunOptions& options, bool grouping) {
  ExplainOptions eo = options.explain;
  eo.grid.protocol.seed = derive_seed(options.seed, {6});
  eo.grid.protocol.grouping = grouping;
  const DetectorModel& det = run.detector;
  return explain(run.z_train, run.names, run.train_labels,
                 [&det](std::span<const double> row) { return det.is_anomaly(row); }, options.grid, eo);
}

std::optional<double> test_auc_of(const SurrogateModel& model, const PreparedRun& run) {
  const std::size_t pos = count_positive(run.test_labels);
  if (pos == 0 || pos == run.test_labels.size()) return std::nullopt;
  return auc(model.score_all(run.z_test), run.test_labels);
}

}  // namespace

SyntheticRunResult run_synthetic(const SyntheticRunOptions& options) {
  const PreparedRun run = prepare(options);
  SyntheticRunResult out;
  out.train_flagged = count_positive(run.train_labels);
  out.test_flagged = count_positive(run.test_labels);
  out.report = explain_prepared(run, options, options.explain.grid.protocol.grouping);
  const SurrogateModel& model = *out.report.surrogate;
  out.test_auc = test_auc_of(model, run);
  out.feature_pr = feature_pr(run.gold_features, out.report.selected);
  out.test_conflicts = conflicts(run.test_labels, model.predict_all(run.z_test));
  out.test_rates = discovery_rates(out.test_conflicts, run.gold_test);
  return out;
}

std::vector<BiasRecord> run_bias_trial(const SyntheticRunOptions& options) {
  const PreparedRun run = prepare(options);
  const std::size_t pos = count_positive(run.test_labels);
  if (pos == 0 || pos == run.test_labels.size()) return {};
  std::vector<BiasRecord> out;
  for (bool grouping : {true, false}) {
    const ExplanationReport report = explain_prepared(run, options, grouping);
    const double test = *test_auc_of(*report.surrogate, run);
    out.push_back({report.bbc_auc, test, grouping ? BiasVariant::BbcGroup : BiasVariant::BbcNoGroup});
    out.push_back({report.cv_auc, test, grouping ? BiasVariant::CvGroup : BiasVariant::CvNoGroup});
  }
  return out;
}

}  // namespace proteus
