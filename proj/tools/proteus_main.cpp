// proteus: explain an unsupervised anomaly detector with a small surrogate model.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "proteus/automl.hpp"
#include "proteus/dataset.hpp"
#include "proteus/detectors.hpp"
#include "proteus/experiment.hpp"
#include "proteus/metrics.hpp"
#include "proteus/model_io.hpp"
#include "proteus/sae_chart.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace proteus;
using proteus::cli::RunConfig;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_dir;
};

struct Context {
  RunConfig config;
  std::uint64_t seed = 0;
  int jobs = 1;
  fs::path out;
};

Context make_context(const Globals& g) {
  Context ctx;
  if (!g.config_path.empty()) ctx.config = RunConfig::load(g.config_path);
  if (g.seed) {
    ctx.seed = *g.seed;
  } else if (ctx.config.has("run.seed")) {
    ctx.seed = ctx.config.u64("run.seed", 0);
  } else {
    throw Error("a seed is required: pass --seed or set [run] seed");
  }
  ctx.jobs = g.jobs > 0 ? g.jobs : static_cast<int>(ctx.config.count("run.jobs", 1));
  if (ctx.jobs < 1) ctx.jobs = 1;
  std::string out = !g.out_dir.empty() ? g.out_dir : ctx.config.text("run.out", "proteus-out");
  ctx.out = out;
  fs::create_directories(ctx.out);
  return ctx;
}

std::string out_file(const Context& ctx, const std::string& name) { return (ctx.out / name).string(); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }

Dataset load_input(const RunConfig& config, const std::string& path_key) {
  CsvOptions opts;
  opts.label_column = config.optional("data.label_column");
  opts.group_column = config.optional("data.group_column");
  return load_csv(config.path(path_key), opts);
}

std::vector<std::size_t> columns_by_name(const Dataset& data, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& name : names) {
    auto it = std::find(data.feature_names.begin(), data.feature_names.end(), name);
    if (it == data.feature_names.end()) throw Error("unknown feature '" + name + "'");
    out.push_back(static_cast<std::size_t>(it - data.feature_names.begin()));
  }
  return out;
}

// Standardize, fit the detector and threshold its training scores.
struct FittedDetector {
  StandardScaler scaler;
  Matrix z;
  DetectorModel model;
  Binarization labels;
};

FittedDetector fit_detector(const Context& ctx, const Dataset& data) {
  FittedDetector f;
  f.scaler = StandardScaler::fit(data.values);
  f.z = f.scaler.transform(data.values);
  const DetectorParams params = cli::detector_params(ctx.config, ctx.seed);
  f.model = DetectorModel::fit(f.z, params, columns_by_name(data, ctx.config.texts("detector.columns")));
  f.labels = binarize(f.model.training_scores(), cli::anomaly_ratio(ctx.config));
  f.model.set_threshold(f.labels.threshold);
  return f;
}

void write_detections(const std::string& path, std::span<const double> scores, std::span<const int> labels) {
  auto out = open_out(path);
  out << "score,label\n";
  for (std::size_t i = 0; i < scores.size(); ++i) out << format_double(scores[i]) << ',' << labels[i] << '\n';
}

// Reads the "label" column of a detections file.
Labels read_detection_labels(const std::string& path) {
  CsvOptions opts;
  opts.label_column = "label";
  Dataset d = load_csv(path, opts);
  return *d.gold_labels;
}

// ---------------------------------------------------------------------------

int cmd_synth(const Context& ctx) {
  const auto dims = ctx.config.counts("synth.dims", {20, 40, 60, 80, 100});
  const double train_fraction = ctx.config.real("synth.train_fraction", 0.7);
  const HicsParent parent = make_hics_like_parent(derive_seed(ctx.seed, {1}));
  write_csv(out_file(ctx, "parent.csv"), parent.dataset);
  {
    auto side = open_out(out_file(ctx, "gold_subspace.txt"));
    auto names = [&](const std::vector<std::size_t>& cols) {
      std::string s;
      for (std::size_t c : cols) s += (s.empty() ? "" : ",") + parent.dataset.feature_names[c];
      return s;
    };
    side << "subspace_2d = " << names(parent.subspace_2d) << '\n';
    side << "subspace_3d = " << names(parent.subspace_3d) << '\n';
    side << "gold_features = " << names(parent.dataset.gold_features) << '\n';
  }
  const Split split = stratified_split(*parent.dataset.gold_labels, train_fraction, derive_seed(ctx.seed, {3}));
  for (std::size_t d : dims) {
    if (d < parent.dataset.cols()) throw Error("synth: dims must be >= " + std::to_string(parent.dataset.cols()));
    if (d == parent.dataset.cols()) continue;
    const Dataset full = generate_synthetic(parent.dataset, d - parent.dataset.cols(), derive_seed(ctx.seed, {2}));
    const std::string stem = "synthetic_d" + std::to_string(d);
    write_csv(out_file(ctx, stem + ".csv"), full);
    write_csv(out_file(ctx, stem + "_train.csv"), full.subset_rows(split.train));
    write_csv(out_file(ctx, stem + "_test.csv"), full.subset_rows(split.test));
    std::cout << "wrote " << stem << ".csv (" << full.rows() << " x " << full.cols() << ")\n";
  }
  return 0;
}

int cmd_detect(const Context& ctx) {
  const Dataset data = load_input(ctx.config, "data.path");
  const FittedDetector f = fit_detector(ctx, data);
  write_detections(out_file(ctx, "detections.csv"), f.model.training_scores(), f.labels.labels);
  std::cout << "detector " << to_string(f.model.kind()) << ": flagged " << count_positive(f.labels.labels) << " of "
            << data.rows() << ", threshold " << format_double(f.labels.threshold) << '\n';
  if (data.gold_labels) {
    std::cout << "auc vs gold " << format_double(auc(f.model.training_scores(), *data.gold_labels)) << '\n';
  }
  if (auto apply = ctx.config.optional_path("detect.apply")) {
    CsvOptions opts;
    opts.label_column = ctx.config.optional("data.label_column");
    const Dataset other = load_csv(*apply, opts);
    if (other.feature_names != data.feature_names) throw Error("detect: " + *apply + " has different columns");
    const Matrix z = f.scaler.transform(other.values);
    const std::vector<double> scores = f.model.score_all(z);
    Labels labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] > f.labels.threshold ? 1 : 0;
    write_detections(out_file(ctx, "detections_apply.csv"), scores, labels);
    std::cout << "applied to " << *apply << ": flagged " << count_positive(labels) << " of " << labels.size() << '\n';
  }
  return 0;
}

int cmd_explain(const Context& ctx) {
  const Dataset data = load_input(ctx.config, "data.path");
  const FittedDetector f = fit_detector(ctx, data);

  std::vector<SelectorConfig> selectors = cli::selectors_from(ctx.config);
  const std::size_t loda_topk = ctx.config.count("grid.loda_topk", 0);
  if (loda_topk > 0) {
    const Loda* loda = f.model.loda();
    if (!loda || !f.model.input_columns().empty()) {
      throw Error("explain: grid.loda_topk needs detector.kind = loda over all columns");
    }
    std::vector<std::size_t> anomalies;
    for (std::size_t i = 0; i < f.labels.labels.size(); ++i) {
      if (f.labels.labels[i]) anomalies.push_back(i);
    }
    SelectorConfig fixed;
    fixed.algorithm = SelectorAlgorithm::Fixed;
    fixed.fixed = select_topk_importance(mean_loda_contributions(*loda, f.z, anomalies), loda_topk).selected;
    fixed.cap = loda_topk;
    if (ctx.config.flag("grid.loda_only", false)) selectors.clear();
    selectors.push_back(fixed);
  }
  const auto grid = make_grid(selectors, cli::classifiers_from(ctx.config), cli::ps_values_from(ctx.config));
  const ExplainOptions options = cli::explain_options(ctx.config, ctx.seed, ctx.jobs);
  const DetectorModel& det = f.model;
  ExplanationReport report = explain(
      f.z, data.feature_names, f.labels.labels, [&det](std::span<const double> row) { return det.is_anomaly(row); },
      grid, options);
  // The saved model reads raw rows.
  report.surrogate = report.surrogate->with_input_scaler(f.scaler);

  save_report(out_file(ctx, "report.txt"), report);
  save_config_table(out_file(ctx, "configurations.csv"), report);
  save_model(out_file(ctx, "model.txt"), *report.surrogate);
  write_detections(out_file(ctx, "detections.csv"), f.model.training_scores(), f.labels.labels);

  std::cout << "best " << report.best.id() << '\n';
  std::cout << "features";
  for (const auto& name : report.selected_names) std::cout << ' ' << name;
  std::cout << "\nbbc_auc " << format_double(report.bbc_auc) << " (cv " << format_double(report.cv_auc) << ")\n";
  const auto gold = ctx.config.texts("data.gold_features");
  if (!gold.empty()) {
    const FeaturePr pr = feature_pr(columns_by_name(data, gold), report.selected);
    std::cout << "precision " << format_double(pr.precision) << (pr.precision_undefined ? " (empty explanation)" : "")
              << " recall " << format_double(pr.recall) << '\n';
  }
  std::cerr << "timing: grid " << report.seconds_grid << " s, bbc " << report.seconds_bbc << " s, final "
            << report.seconds_final << " s\n";
  return 0;
}

Dataset load_for_model(const RunConfig& config, const std::string& key, const SurrogateModel& model) {
  CsvOptions opts;
  opts.label_column = config.optional("data.label_column");
  Dataset data = load_csv(config.path(key), opts);
  if (data.cols() != model.input_names().size()) {
    throw Error("model expects " + std::to_string(model.input_names().size()) + " features, " + config.path(key) +
                " has " + std::to_string(data.cols()));
  }
  if (data.feature_names != model.input_names()) throw Error("feature names differ from the model's inputs");
  return data;
}

int cmd_predict(const Context& ctx) {
  const SurrogateModel model = load_model(ctx.config.path("predict.model"));
  const Dataset data = load_for_model(ctx.config, "predict.input", model);
  const std::vector<double> scores = model.score_all(data.values);
  Labels labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] > 0.5 ? 1 : 0;
  write_detections(out_file(ctx, "predictions.csv"), scores, labels);
  std::cout << "predicted " << labels.size() << " rows, " << count_positive(labels) << " anomalies\n";
  return 0;
}

int cmd_evaluate(const Context& ctx) {
  const SurrogateModel model = load_model(ctx.config.path("evaluate.model"));
  const Dataset data = load_for_model(ctx.config, "evaluate.input", model);
  const Labels detector = read_detection_labels(ctx.config.path("evaluate.detections"));
  if (detector.size() != data.rows()) throw Error("evaluate: detections and input differ in length");
  const std::vector<double> scores = model.score_all(data.values);
  const Labels surrogate = model.predict_all(data.values);

  std::optional<double> test_auc;
  const std::size_t pos = count_positive(detector);
  if (pos > 0 && pos < detector.size()) test_auc = auc(scores, detector);
  const ConflictSets c = conflicts(detector, surrogate);

  auto out = open_out(out_file(ctx, "metrics.csv"));
  out << "n,detector_anomalies,test_auc,anc,nac";
  std::optional<DiscoveryRates> rates;
  if (data.gold_labels) {
    rates = discovery_rates(c, *data.gold_labels);
    out << ",tnd,tad";
  }
  out << '\n' << data.rows() << ',' << pos << ',' << optional_number(test_auc) << ',' << c.anc.size() << ','
      << c.nac.size();
  if (rates) out << ',' << optional_number(rates->tnd) << ',' << optional_number(rates->tad);
  out << '\n';

  auto ids = open_out(out_file(ctx, "conflicts.csv"));
  ids << "row,set\n";
  for (std::size_t i : c.anc) ids << i << ",ANC\n";
  for (std::size_t i : c.nac) ids << i << ",NAC\n";

  std::cout << "test_auc " << optional_number(test_auc) << ", ANC " << c.anc.size() << ", NAC " << c.nac.size();
  if (rates) std::cout << ", TND " << optional_number(rates->tnd) << ", TAD " << optional_number(rates->tad);
  std::cout << '\n';
  return 0;
}

int cmd_chart(const Context& ctx) {
  const SurrogateModel model = load_model(ctx.config.path("chart.model"));
  const Dataset reference = load_for_model(ctx.config, "chart.reference", model);
  const Dataset data = load_for_model(ctx.config, "chart.input", model);
  const auto rows = ctx.config.counts("chart.samples", {});
  if (rows.empty()) throw Error("chart: list the rows to draw in [chart] samples");
  std::optional<Labels> detector;
  if (auto p = ctx.config.optional_path("chart.detections")) detector = read_detection_labels(*p);

  const QuantileMap map = QuantileMap::fit(reference.values, model.features());
  std::vector<ChartSample> samples;
  for (std::size_t r : rows) {
    if (r >= data.rows()) throw Error("chart: row " + std::to_string(r) + " out of range");
    ChartSample s;
    s.id = std::to_string(r);
    auto row = row_of(data.values, static_cast<Eigen::Index>(r));
    s.row.assign(row.begin(), row.end());
    s.surrogate_label = model.predict(row);
    s.detector_label = detector ? (*detector)[r] : -1;
    samples.push_back(std::move(s));
  }
  const SaeChart chart = build_chart(map, model.input_names(), samples);
  std::string name = "chart";
  for (std::size_t r : rows) name += "_" + std::to_string(r);
  write_svg(chart, out_file(ctx, name + ".svg"));
  std::cout << "wrote " << name << ".svg (" << chart.axes.size() << " axes)\n";
  return 0;
}

int cmd_bias(const Context& ctx) {
  const std::size_t runs = ctx.config.count("bias.runs", 20);
  if (runs == 0) throw Error("bias-experiment: bias.runs must be >= 1");
  SyntheticRunOptions base;
  base.dims = ctx.config.count("bias.dims", 20);
  base.detector = cli::detector_params(ctx.config, ctx.seed);
  base.train_fraction = ctx.config.real("synth.train_fraction", 0.7);
  base.grid = make_grid(cli::selectors_from(ctx.config), cli::classifiers_from(ctx.config),
                        cli::ps_values_from(ctx.config));
  base.explain = cli::explain_options(ctx.config, ctx.seed, ctx.jobs);

  std::vector<BiasRecord> records;
  auto out = open_out(out_file(ctx, "bias_records.csv"));
  out << "run,variant,train_estimate,test_auc\n";
  std::size_t skipped = 0;
  for (std::size_t run = 0; run < runs; ++run) {
    SyntheticRunOptions o = base;
    o.seed = derive_seed(ctx.seed, {0xb1a5, run});
    const auto recs = run_bias_trial(o);
    if (recs.empty()) ++skipped;
    for (const auto& r : recs) {
      out << run << ',' << to_string(r.variant) << ',' << format_double(r.train_estimate) << ','
          << format_double(r.test_auc) << '\n';
      records.push_back(r);
    }
    std::cerr << "run " << run + 1 << "/" << runs << (recs.empty() ? " skipped (single-class test split)" : "")
              << '\n';
  }
  if (records.empty()) throw Error("bias-experiment: every run had a single-class test split");
  auto summary = open_out(out_file(ctx, "bias_summary.csv"));
  summary << "variant,runs,rss,mean_bias\n";
  for (const auto& s : bias_summary(records)) {
    summary << to_string(s.variant) << ',' << s.count << ',' << format_double(s.rss) << ','
            << format_double(s.mean_bias) << '\n';
    std::cout << to_string(s.variant) << ": rss " << format_double(s.rss) << ", mean bias "
              << format_double(s.mean_bias) << '\n';
  }
  if (skipped) std::cout << skipped << " runs skipped\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explain an anomaly detector with a reduced-dimensionality surrogate model."};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "run configuration (INI)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_dir, "output directory");

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Context&);
  };
  const Sub subs[] = {
      {"synth", "write the synthetic benchmark CSVs", cmd_synth},
      {"detect", "score a CSV with an anomaly detector", cmd_detect},
      {"explain", "search the surrogate grid and fit the explanation", cmd_explain},
      {"predict", "score fresh rows with a saved surrogate", cmd_predict},
      {"evaluate", "test AUC and conflict metrics of a saved surrogate", cmd_evaluate},
      {"chart", "draw spider charts for selected rows", cmd_chart},
      {"bias-experiment", "train/test estimation bias of the CV protocols", cmd_bias},
  };
  app.fallthrough();
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (const auto& s : subs) {
      if (app.got_subcommand(s.name)) return s.run(make_context(g));
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "proteus: " << msg << '\n';
    return 1;
  }
  return 1;
}
