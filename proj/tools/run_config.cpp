#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace proteus::cli {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw Error("config: " + key + ": not a number: '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error("config: " + key + ": not a non-negative integer: '" + v + "'");
  }
  return out;
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  RunConfig config;
  if (!std::filesystem::exists(path)) throw Error("config: no such file: " + path);
  try {
    boost::property_tree::ini_parser::read_ini(path, config.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error("config: " + std::string(e.what()));
  }
  config.base_dir_ = std::filesystem::path(path).parent_path().string();
  return config;
}

bool RunConfig::has(const std::string& key) const { return optional(key).has_value(); }

std::optional<std::string> RunConfig::optional(const std::string& key) const {
  auto v = tree_.get_optional<std::string>(key);
  if (!v) return std::nullopt;
  std::string t = trim(*v);
  if (t.empty()) return std::nullopt;
  return t;
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  return optional(key).value_or(fallback);
}

std::string RunConfig::required(const std::string& key) const {
  auto v = optional(key);
  if (!v) throw Error("config: missing required key '" + key + "'");
  return *v;
}

double RunConfig::real(const std::string& key, double fallback) const {
  auto v = optional(key);
  return v ? parse_real(key, *v) : fallback;
}

std::size_t RunConfig::count(const std::string& key, std::size_t fallback) const {
  auto v = optional(key);
  return v ? static_cast<std::size_t>(parse_u64(key, *v)) : fallback;
}

std::uint64_t RunConfig::u64(const std::string& key, std::uint64_t fallback) const {
  auto v = optional(key);
  return v ? parse_u64(key, *v) : fallback;
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  auto v = optional(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw Error("config: " + key + ": not a boolean: '" + *v + "'");
}

std::vector<double> RunConfig::reals(const std::string& key, const std::vector<double>& fallback) const {
  auto v = optional(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(*v)) out.push_back(parse_real(key, item));
  return out;
}

std::vector<std::size_t> RunConfig::counts(const std::string& key, const std::vector<std::size_t>& fallback) const {
  auto v = optional(key);
  if (!v) return fallback;
  std::vector<std::size_t> out;
  for (const auto& item : split_list(*v)) out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
  return out;
}

std::vector<std::string> RunConfig::texts(const std::string& key) const {
  auto v = optional(key);
  return v ? split_list(*v) : std::vector<std::string>{};
}

std::string RunConfig::path(const std::string& key) const {
  auto p = optional_path(key);
  if (!p) throw Error("config: missing required key '" + key + "'");
  return *p;
}

std::optional<std::string> RunConfig::optional_path(const std::string& key) const {
  auto v = optional(key);
  if (!v) return std::nullopt;
  std::filesystem::path p(*v);
  if (p.is_relative() && !base_dir_.empty()) p = std::filesystem::path(base_dir_) / p;
  return p.string();
}

DetectorParams detector_params(const RunConfig& config, std::uint64_t seed) {
  DetectorParams p;
  p.kind = parse_detector_kind(config.text("detector.kind", "iforest"));
  p.iforest.n_trees = config.count("detector.n_trees", p.iforest.n_trees);
  p.iforest.subsample_size = config.count("detector.subsample_size", p.iforest.subsample_size);
  p.iforest.seed = derive_seed(seed, {0xd1});
  p.lof.k_neighbors = config.count("detector.k_neighbors", p.lof.k_neighbors);
  p.loda.n_projections = config.count("detector.n_projections", p.loda.n_projections);
  p.loda.n_bins = config.count("detector.n_bins", p.loda.n_bins);
  p.loda.seed = derive_seed(seed, {0xd2});
  return p;
}

double anomaly_ratio(const RunConfig& config) {
  const double r = config.real("detector.anomaly_ratio", 0.01);
  if (!(r > 0.0 && r < 1.0)) throw Error("config: detector.anomaly_ratio must be in (0,1)");
  return r;
}

std::vector<SelectorConfig> selectors_from(const RunConfig& config) {
  const std::size_t cap = config.count("grid.cap", 10);
  std::vector<SelectorConfig> out;
  for (double lambda : config.reals("grid.lasso_lambda", {0.001, 0.005, 0.01, 0.05})) {
    SelectorConfig s;
    s.algorithm = SelectorAlgorithm::Lasso;
    s.lambda = lambda;
    s.cap = cap;
    out.push_back(s);
  }
  for (double alpha : config.reals("grid.fbed_alpha", {0.05, 0.1})) {
    for (std::size_t k_runs : config.counts("grid.fbed_k_runs", {0, 1})) {
      SelectorConfig s;
      s.algorithm = SelectorAlgorithm::Fbed;
      s.alpha = alpha;
      s.k_runs = k_runs;
      s.cap = cap;
      out.push_back(s);
    }
  }
  if (config.flag("grid.full", true)) {
    SelectorConfig s;
    s.algorithm = SelectorAlgorithm::Full;
    out.push_back(s);
  }
  for (const auto& s : out) s.validate();
  if (out.empty()) throw Error("config: the selector grid is empty");
  return out;
}

std::vector<ClassifierConfig> classifiers_from(const RunConfig& config) {
  std::vector<ClassifierConfig> out;
  for (std::size_t k : config.counts("grid.knn_k", {3, 5, 11})) {
    ClassifierConfig c;
    c.algorithm = ClassifierAlgorithm::Knn;
    c.k = k;
    out.push_back(c);
  }
  for (std::size_t trees : config.counts("grid.rf_trees", {100})) {
    for (std::size_t leaf : config.counts("grid.rf_min_leaf", {1, 3})) {
      ClassifierConfig c;
      c.algorithm = ClassifierAlgorithm::RandomForest;
      c.n_trees = trees;
      c.min_leaf = leaf;
      out.push_back(c);
    }
  }
  for (double cc : config.reals("grid.svm_c", {0.1, 1.0, 10.0})) {
    ClassifierConfig c;
    c.algorithm = ClassifierAlgorithm::LinearSvm;
    c.c = cc;
    c.epochs = config.count("grid.svm_epochs", 200);
    out.push_back(c);
  }
  for (const auto& c : out) c.validate();
  if (out.empty()) throw Error("config: the classifier grid is empty");
  return out;
}

std::vector<std::size_t> ps_values_from(const RunConfig& config) {
  auto ps = config.counts("oversampling.ps", kDefaultPs);
  if (ps.empty()) throw Error("config: oversampling.ps is empty");
  return ps;
}

ExplainOptions explain_options(const RunConfig& config, std::uint64_t seed, int jobs) {
  ExplainOptions o;
  o.grid.protocol.k = config.count("cv.k", 10);
  o.grid.protocol.r = config.count("cv.r", 5);
  o.grid.protocol.grouping = config.flag("cv.grouping", true);
  o.grid.protocol.seed = derive_seed(seed, {0xc5});
  o.grid.protocol.validate();
  o.grid.sigma = config.real("oversampling.sigma", 0.1);
  o.grid.max_attempts_per_pseudo = config.count("oversampling.max_attempts", 50);
  o.grid.jobs = jobs;
  o.bootstraps = config.count("cv.bootstraps", 500);
  o.cap_folds = config.flag("cv.cap_folds", true);
  return o;
}

}  // namespace proteus::cli
