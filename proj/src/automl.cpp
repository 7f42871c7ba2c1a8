#include "proteus/automl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "proteus/metrics.hpp"

namespace proteus {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t hash_subset(std::span<const std::size_t> s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t f : s) h = fnv1a(h, f);
  return h;
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Seed namespaces
constexpr std::uint64_t kOversampleTag = 0x05;
constexpr std::uint64_t kPseudoFoldTag = 0x0f;
constexpr std::uint64_t kClassifierTag = 0x0c;

}  // namespace

void CvProtocol::validate() const {
  if (k < 2) throw Error("cv: k must be >= 2");
  if (r < 1) throw Error("cv: r must be >= 1");
}

std::string Configuration::id() const {
  return selector.id() + "|" + classifier.id() + "|ps=" + std::to_string(ps);
}

std::vector<Configuration> make_grid(const std::vector<SelectorConfig>& selectors,
                                     const std::vector<ClassifierConfig>& classifiers,
                                     const std::vector<std::size_t>& ps_values) {
  std::vector<Configuration> out;
  for (std::size_t ps : ps_values) {
    for (const auto& s : selectors) {
      s.validate();
      for (const auto& c : classifiers) {
        c.validate();
        out.push_back({s, c, ps});
      }
    }
  }
  return out;
}

std::vector<SelectorConfig> default_selectors() {
  std::vector<SelectorConfig> out;
  for (double lambda : {0.001, 0.005, 0.01, 0.05}) {
    SelectorConfig s;
    s.algorithm = SelectorAlgorithm::Lasso;
    s.lambda = lambda;
    out.push_back(s);
  }
  for (double alpha : {0.05, 0.1}) {
    for (std::size_t k_runs : {0, 1}) {
      SelectorConfig s;
      s.algorithm = SelectorAlgorithm::Fbed;
      s.alpha = alpha;
      s.k_runs = k_runs;
      out.push_back(s);
    }
  }
  SelectorConfig full;
  full.algorithm = SelectorAlgorithm::Full;
  out.push_back(full);
  return out;
}

std::vector<ClassifierConfig> default_classifiers() {
  std::vector<ClassifierConfig> out;
  for (std::size_t k : {3, 5, 11}) {
    ClassifierConfig c;
    c.algorithm = ClassifierAlgorithm::Knn;
    c.k = k;
    out.push_back(c);
  }
  for (std::size_t min_leaf : {1, 3}) {
    ClassifierConfig c;
    c.algorithm = ClassifierAlgorithm::RandomForest;
    c.n_trees = 100;
    c.min_leaf = min_leaf;
    out.push_back(c);
  }
  for (double cc : {0.1, 1.0, 10.0}) {
    ClassifierConfig c;
    c.algorithm = ClassifierAlgorithm::LinearSvm;
    c.c = cc;
    out.push_back(c);
  }
  return out;
}

std::vector<Configuration> default_grid() {
  return make_grid(default_selectors(), default_classifiers(), kDefaultPs);
}

FoldAssignment make_folds(std::span<const int> labels, std::span<const int> groups, const CvProtocol& protocol) {
  protocol.validate();
  if (labels.size() != groups.size()) throw Error("folds: label/group length mismatch");
  std::map<int, int> group_label;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int& l = group_label[groups[i]];
    l = std::max(l, labels[i] != 0 ? 1 : 0);
  }
  std::vector<int> pos, neg;
  for (const auto& [g, l] : group_label) (l ? pos : neg).push_back(g);
  const std::size_t k = protocol.k;
  if (pos.size() < k) {
    throw Error("folds: only " + std::to_string(pos.size()) + " anomaly groups for k=" + std::to_string(k) +
                "; use a smaller k");
  }
  if (neg.size() < k) {
    throw Error("folds: only " + std::to_string(neg.size()) + " normal groups for k=" + std::to_string(k) +
                "; use a smaller k");
  }

  FoldAssignment out(protocol.r, std::vector<int>(labels.size(), -1));
  for (std::size_t r = 0; r < protocol.r; ++r) {
    std::mt19937_64 rng(derive_seed(protocol.seed, {r}));
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::map<int, int> fold_of;
    for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = static_cast<int>(i % k);
    for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = static_cast<int>((pos.size() + i) % k);
    for (std::size_t i = 0; i < labels.size(); ++i) out[r][i] = fold_of[groups[i]];
  }
  return out;
}

const OversampledSet& GridResult::set_for(std::size_t ps) const {
  for (const auto& s : oversampled) {
    if (s.ps == ps) return s;
  }
  throw Error("grid: no oversampled set for ps=" + std::to_string(ps));
}

GridResult evaluate_grid(const Matrix& z, const Labels& labels, const AnomalyOracle& oracle,
                         const std::vector<Configuration>& configs, const GridOptions& options) {
  const CvProtocol& protocol = options.protocol;
  protocol.validate();
  if (configs.empty()) throw Error("grid: no configuration to evaluate");
  const auto n = static_cast<std::size_t>(z.rows());
  if (labels.size() != n) throw Error("grid: label count mismatch");

  std::vector<int> singletons(n);
  std::iota(singletons.begin(), singletons.end(), 0);
  const FoldAssignment original_folds = make_folds(labels, singletons, protocol);

  GridResult result;
  result.configs = configs;
  result.folds = protocol.k;

  // One augmented set per distinct ps. Originals keep the same folds for
  // every ps; pseudo rows follow their parent unless grouping is off.
  for (const auto& c : configs) {
    bool seen = false;
    for (const auto& s : result.oversampled) seen = seen || s.ps == c.ps;
    if (seen) continue;
    OversampledSet set;
    set.ps = c.ps;
    OversampleParams params;
    params.ps = c.ps;
    params.sigma = options.sigma;
    params.max_attempts_per_pseudo = options.max_attempts_per_pseudo;
    params.seed = derive_seed(protocol.seed, {kOversampleTag, c.ps});
    set.data = oversample(z, labels, oracle, params);
    for (std::size_t r = 0; r < protocol.r; ++r) {
      std::vector<int> f = original_folds[r];
      std::mt19937_64 rng(derive_seed(protocol.seed, {kPseudoFoldTag, r, c.ps}));
      std::uniform_int_distribution<int> any_fold(0, static_cast<int>(protocol.k) - 1);
      for (std::size_t p = 0; p < set.data.n_pseudo(); ++p) {
        f.push_back(protocol.grouping ? original_folds[r][set.data.pseudo_parent[p]] : any_fold(rng));
      }
      set.folds.push_back(std::move(f));
    }
    result.oversampled.push_back(std::move(set));
  }

  const std::size_t n_configs = configs.size();
  const std::size_t n_sets = result.oversampled.size();
  std::vector<std::vector<std::size_t>> configs_of_set(n_sets);
  for (std::size_t c = 0; c < n_configs; ++c) {
    for (std::size_t s = 0; s < n_sets; ++s) {
      if (result.oversampled[s].ps == configs[c].ps) configs_of_set[s].push_back(c);
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  result.predictions.assign(protocol.r, Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                                                  static_cast<Eigen::Index>(n_configs), nan));
  std::vector<Eigen::MatrixXi> counts(protocol.r, Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n),
                                                                        static_cast<Eigen::Index>(n_configs)));
  std::vector<double> subset_sizes(protocol.r * protocol.k * n_configs, 0.0);

  const std::size_t n_tasks = protocol.r * protocol.k * n_sets;
  parallel_for(n_tasks, options.jobs, [&](std::size_t task) {
    const std::size_t s = task % n_sets;
    const std::size_t fold = (task / n_sets) % protocol.k;
    const std::size_t r = task / (n_sets * protocol.k);
    const OversampledSet& set = result.oversampled[s];
    const std::vector<int>& assign = set.folds[r];

    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < set.data.size(); ++i) {
      if (assign[i] != static_cast<int>(fold)) {
        train.push_back(i);
      } else if (i < n) {
        test.push_back(i);
      }
    }
    const Matrix x_train_raw = set.data.rows(train);
    Labels y_train(train.size());
    std::vector<int> g_train(train.size());
    const std::vector<int> all_groups = set.data.group_ids();
    for (std::size_t m = 0; m < train.size(); ++m) {
      y_train[m] = set.data.label(train[m]);
      g_train[m] = all_groups[train[m]];
    }
    const std::size_t pos = count_positive(y_train);
    if (pos == 0 || pos == y_train.size()) throw Error("grid: a training fold holds a single class");

    const StandardScaler scaler = StandardScaler::fit(x_train_raw);
    const Matrix x_train = scaler.transform(x_train_raw);
    const Matrix x_test = scaler.transform(take_rows(z, test));

    std::map<std::string, std::vector<std::size_t>> selections;
    std::map<std::pair<std::vector<std::size_t>, std::string>, std::vector<double>> fitted;

    for (std::size_t c : configs_of_set[s]) {
      const Configuration& config = configs[c];
      const std::string sel_id = config.selector.id();
      auto sit = selections.find(sel_id);
      if (sit == selections.end()) {
        sit = selections.emplace(sel_id, run_selector(config.selector, x_train, y_train).selected).first;
      }
      const std::vector<std::size_t>& subset = sit->second;
      subset_sizes[(r * protocol.k + fold) * n_configs + c] = static_cast<double>(subset.size());

      const std::string clf_id = config.classifier.id();
      auto key = std::make_pair(subset, clf_id);
      auto fit_it = fitted.find(key);
      if (fit_it == fitted.end()) {
        std::vector<double> scores(test.size(), 0.5);
        if (!subset.empty()) {
          const Matrix xs_train = take_cols(x_train, subset);
          const Matrix xs_test = take_cols(x_test, subset);
          const std::uint64_t seed =
              derive_seed(protocol.seed, {kClassifierTag, r, fold, set.ps, hash_subset(subset), hash_string(clf_id)});
          const Classifier clf =
              Classifier::fit(config.classifier, xs_train, y_train, seed, protocol.grouping ? &g_train : nullptr);
          for (std::size_t m = 0; m < test.size(); ++m) {
            scores[m] = clf.score(row_of(xs_test, static_cast<Eigen::Index>(m)));
          }
        }
        fit_it = fitted.emplace(std::move(key), std::move(scores)).first;
      }
      for (std::size_t m = 0; m < test.size(); ++m) {
        const auto row = static_cast<Eigen::Index>(test[m]);
        result.predictions[r](row, static_cast<Eigen::Index>(c)) = fit_it->second[m];
        counts[r](row, static_cast<Eigen::Index>(c)) += 1;
      }
    }
  });

  result.score_counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_configs));
  for (const auto& m : counts) result.score_counts += m;

  result.mean_auc.assign(n_configs, 0.0);
  result.mean_subset_size.assign(n_configs, 0.0);
  for (std::size_t c = 0; c < n_configs; ++c) {
    for (std::size_t r = 0; r < protocol.r; ++r) {
      const auto col = result.predictions[r].col(static_cast<Eigen::Index>(c));
      result.mean_auc[c] += auc(std::span<const double>(col.data(), n), labels);
      for (std::size_t f = 0; f < protocol.k; ++f) {
        result.mean_subset_size[c] += subset_sizes[(r * protocol.k + f) * n_configs + c];
      }
    }
    result.mean_auc[c] /= static_cast<double>(protocol.r);
    result.mean_subset_size[c] /= static_cast<double>(protocol.r * protocol.k);
  }
  return result;
}

std::size_t select_winner(const GridResult& result) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < result.configs.size(); ++c) {
    const double a = result.mean_auc[c];
    const double b = result.mean_auc[best];
    if (a != b) {
      if (a > b) best = c;
      continue;
    }
    const double sa = result.mean_subset_size[c];
    const double sb = result.mean_subset_size[best];
    if (sa != sb) {
      if (sa < sb) best = c;
      continue;
    }
    if (result.configs[c].id() < result.configs[best].id()) best = c;
  }
  return best;
}

BbcResult bbc_correct(const std::vector<Eigen::MatrixXd>& predictions, std::span<const int> labels,
                      std::span<const int> groups, std::size_t bootstraps, std::uint64_t seed, int jobs) {
  if (predictions.empty()) throw Error("bbc: no prediction matrix");
  if (bootstraps < 1) throw Error("bbc: bootstrap count must be >= 1");
  const std::size_t n = labels.size();
  const std::size_t pos = count_positive(labels);
  if (pos == 0 || pos == n) throw Error("bbc: labels contain a single class");
  if (!groups.empty() && groups.size() != n) throw Error("bbc: group count mismatch");

  // Dense group index per row.
  std::vector<std::size_t> group_of(n);
  std::size_t n_groups = 0;
  if (groups.empty()) {
    std::iota(group_of.begin(), group_of.end(), 0);
    n_groups = n;
  } else {
    std::map<int, std::size_t> dense;
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, inserted] = dense.emplace(groups[i], dense.size());
      group_of[i] = it->second;
    }
    n_groups = dense.size();
  }

  BbcResult out;
  constexpr std::size_t kMaxAttempts = 1000;
  for (std::size_t r = 0; r < predictions.size(); ++r) {
    const Eigen::MatrixXd& m = predictions[r];
    if (static_cast<std::size_t>(m.rows()) != n) throw Error("bbc: prediction matrix row count mismatch");
    if (!m.allFinite()) throw Error("bbc: prediction matrix has unfilled cells");
    const auto n_configs = static_cast<std::size_t>(m.cols());

    std::vector<std::vector<std::size_t>> order(n_configs, std::vector<std::size_t>(n));
    for (std::size_t c = 0; c < n_configs; ++c) {
      const double* col = m.col(static_cast<Eigen::Index>(c)).data();
      std::iota(order[c].begin(), order[c].end(), 0);
      std::sort(order[c].begin(), order[c].end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    }

    std::vector<double> values(bootstraps);
    std::vector<std::size_t> redraws(bootstraps, 0);
    parallel_for(bootstraps, jobs, [&](std::size_t b) {
      std::mt19937_64 rng(derive_seed(seed, {r, b}));
      std::uniform_int_distribution<std::size_t> draw(0, n_groups - 1);
      std::vector<int> group_count(n_groups);
      std::vector<int> in_w(n), out_w(n);
      for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::fill(group_count.begin(), group_count.end(), 0);
        for (std::size_t g = 0; g < n_groups; ++g) ++group_count[draw(rng)];
        for (std::size_t i = 0; i < n; ++i) {
          in_w[i] = group_count[group_of[i]];
          out_w[i] = in_w[i] == 0 ? 1 : 0;
        }
        std::size_t best = n_configs;
        double best_auc = -1.0;
        for (std::size_t c = 0; c < n_configs; ++c) {
          const std::span<const double> col(m.col(static_cast<Eigen::Index>(c)).data(), n);
          const auto a = weighted_auc(col, labels, order[c], in_w);
          if (!a) break;
          if (*a > best_auc) {
            best_auc = *a;
            best = c;
          }
        }
        if (best < n_configs) {
          const std::span<const double> col(m.col(static_cast<Eigen::Index>(best)).data(), n);
          const auto oob = weighted_auc(col, labels, order[best], out_w);
          if (oob) {
            values[b] = *oob;
            return;
          }
        }
        ++redraws[b];
      }
      throw Error("bbc: could not draw a bootstrap sample with both classes in and out of bag");
    });

    out.per_repeat.push_back(std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(bootstraps));
    out.redraws += std::accumulate(redraws.begin(), redraws.end(), std::size_t{0});
  }
  out.estimate = std::accumulate(out.per_repeat.begin(), out.per_repeat.end(), 0.0) /
                 static_cast<double>(out.per_repeat.size());
  return out;
}

SurrogateModel fit_surrogate(const AugmentedDataset& data, const std::vector<std::string>& names,
                             const Configuration& config, std::uint64_t seed, bool grouping) {
  if (names.size() != static_cast<std::size_t>(data.original.cols())) throw Error("surrogate: name count mismatch");
  const Matrix x = data.all_rows();
  const Labels y = data.all_labels();
  const std::vector<int> groups = data.group_ids();
  const StandardScaler scaler = StandardScaler::fit(x);
  const Matrix z = scaler.transform(x);
  const std::vector<std::size_t> subset = run_selector(config.selector, z, y).selected;
  const Classifier clf = Classifier::fit(config.classifier, take_cols(z, subset), y, seed, grouping ? &groups : nullptr);
  return SurrogateModel(names, subset, scaler.select(subset), clf);
}

ExplanationReport explain(const Matrix& z, const std::vector<std::string>& names, const Labels& labels,
                          const AnomalyOracle& oracle, const std::vector<Configuration>& configs,
                          const ExplainOptions& options) {
  const std::size_t anomalies = count_positive(labels);
  if (anomalies == 0) throw Error("explain: the detector flagged no anomaly");
  GridOptions grid_options = options.grid;
  if (options.cap_folds) grid_options.protocol.k = std::min(grid_options.protocol.k, anomalies);
  if (grid_options.protocol.k < 2) {
    throw Error("explain: at least 2 flagged anomalies are needed for cross-validation");
  }

  ExplanationReport report;
  report.n_train = labels.size();
  report.n_anomalies = anomalies;
  report.folds = grid_options.protocol.k;
  report.repeats = grid_options.protocol.r;

  auto t0 = std::chrono::steady_clock::now();
  const GridResult grid = evaluate_grid(z, labels, oracle, configs, grid_options);
  report.seconds_grid = seconds_since(t0);

  report.best_index = select_winner(grid);
  report.best = grid.configs[report.best_index];
  report.cv_auc = grid.mean_auc[report.best_index];
  for (std::size_t c = 0; c < grid.configs.size(); ++c) {
    report.table.push_back({grid.configs[c].id(), grid.configs[c].ps, grid.mean_auc[c], grid.mean_subset_size[c]});
  }
  for (const auto& s : grid.oversampled) report.fill_rates.emplace_back(s.ps, s.data.fill);

  t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = grid_options.protocol.seed;
  report.bbc_auc =
      bbc_correct(grid.predictions, labels, {}, options.bootstraps, derive_seed(seed, {0xbbc}), grid_options.jobs)
          .estimate;
  report.seconds_bbc = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  report.surrogate = fit_surrogate(grid.set_for(report.best.ps).data, names, report.best,
                                   derive_seed(seed, {0xf17a1}), grid_options.protocol.grouping);
  report.selected = report.surrogate->features();
  report.selected_names = report.surrogate->feature_names();
  report.seconds_final = seconds_since(t0);
  return report;
}

}  // namespace proteus
