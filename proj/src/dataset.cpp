#include "proteus/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

namespace proteus {

void Dataset::validate() const {
  if (feature_names.size() != cols()) {
    throw Error("dataset: " + std::to_string(feature_names.size()) + " feature names for " +
                std::to_string(cols()) + " columns");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : feature_names) {
    if (!seen.insert(name).second) throw Error("dataset: duplicate feature name '" + name + "'");
  }
  if (!values.allFinite()) throw Error("dataset: non-finite value");
  if (gold_labels && gold_labels->size() != rows()) throw Error("dataset: gold label count mismatch");
  if (group_ids && group_ids->size() != rows()) throw Error("dataset: group id count mismatch");
  for (std::size_t f : gold_features) {
    if (f >= cols()) throw Error("dataset: gold feature index out of range");
  }
}

Dataset Dataset::subset_rows(std::span<const std::size_t> rows_to_keep) const {
  Dataset out;
  out.values = take_rows(values, rows_to_keep);
  out.feature_names = feature_names;
  out.gold_features = gold_features;
  if (gold_labels) {
    Labels g;
    g.reserve(rows_to_keep.size());
    for (auto r : rows_to_keep) g.push_back((*gold_labels)[r]);
    out.gold_labels = std::move(g);
  }
  if (group_ids) {
    std::vector<int> g;
    g.reserve(rows_to_keep.size());
    for (auto r : rows_to_keep) g.push_back((*group_ids)[r]);
    out.group_ids = std::move(g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standardization

StandardScaler::StandardScaler(Vector means, Vector std_devs)
    : means_(std::move(means)), std_devs_(std::move(std_devs)) {
  if (means_.size() != std_devs_.size()) throw Error("scaler: size mismatch");
  for (Eigen::Index j = 0; j < std_devs_.size(); ++j) {
    if (!(std_devs_[j] > 0.0)) throw Error("scaler: std must be positive");
  }
}

StandardScaler StandardScaler::fit(const Matrix& x) {
  if (x.rows() < 1) throw Error("scaler: empty matrix");
  const double n = static_cast<double>(x.rows());
  Vector means = x.colwise().sum().transpose() / n;
  Vector stds(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      double d = x(i, j) - means[j];
      ss += d * d;
    }
    double sd = std::sqrt(ss / n);
    // Relative test so that a column of one repeated value with rounding noise
    // still counts as constant.
    stds[j] = (sd <= 1e-12 * std::max(1.0, std::abs(means[j]))) ? 1.0 : sd;
  }
  return StandardScaler(std::move(means), std::move(stds));
}

Matrix StandardScaler::transform(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != dim()) throw Error("scaler: dimension mismatch");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - means_[j]) / std_devs_[j];
  }
  return out;
}

void StandardScaler::transform_row(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim() || out.size() != dim()) throw Error("scaler: dimension mismatch");
  for (std::size_t j = 0; j < in.size(); ++j) {
    auto jj = static_cast<Eigen::Index>(j);
    out[j] = (in[j] - means_[jj]) / std_devs_[jj];
  }
}

StandardScaler StandardScaler::select(std::span<const std::size_t> columns) const {
  Vector m(static_cast<Eigen::Index>(columns.size()));
  Vector s(static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] >= dim()) throw Error("scaler: column out of range");
    m[static_cast<Eigen::Index>(k)] = means_[static_cast<Eigen::Index>(columns[k])];
    s[static_cast<Eigen::Index>(k)] = std_devs_[static_cast<Eigen::Index>(columns[k])];
  }
  return StandardScaler(std::move(m), std::move(s));
}

StandardScaler StandardScaler::after(const StandardScaler& inner) const {
  if (inner.dim() != dim()) throw Error("scaler: dimension mismatch");
  // ((x - m1)/s1 - m2)/s2 == (x - (m1 + s1*m2)) / (s1*s2)
  Vector m = inner.means_.array() + inner.std_devs_.array() * means_.array();
  Vector s = inner.std_devs_.array() * std_devs_.array();
  return StandardScaler(std::move(m), std::move(s));
}

StandardScaler fit_standardizer(const Dataset& data) {
  if (data.rows() < 2) throw Error("standardizer needs at least 2 rows");
  return StandardScaler::fit(data.values);
}

Dataset apply_standardizer(const StandardScaler& scaler, const Dataset& data) {
  Dataset out = data;
  out.values = scaler.transform(data.values);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path + "': empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);

  std::unordered_set<std::string> seen;
  for (const auto& h : header) {
    if (!seen.insert(h).second) throw Error("'" + path + "': duplicate header '" + h + "'");
  }

  auto find_column = [&](const std::optional<std::string>& name) -> std::optional<std::size_t> {
    if (!name) return std::nullopt;
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw Error("'" + path + "': no column named '" + *name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto label_col = find_column(options.label_column);
  const auto group_col = find_column(options.group_column);
  if (label_col && group_col && *label_col == *group_col) {
    throw Error("'" + path + "': label and group column are the same");
  }

  Dataset data;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_col || c == group_col) continue;
    feature_cols.push_back(c);
    data.feature_names.push_back(header[c]);
  }

  std::vector<std::vector<double>> rows;
  Labels gold;
  std::vector<int> groups;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw Error("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(feature_cols.size());
    for (std::size_t c : feature_cols) {
      double v = 0.0;
      if (!parse_double(trim(cells[c]), v)) {
        throw Error("'" + path + "' line " + std::to_string(line_no) + ", column '" + header[c] +
                    "': not a finite number: '" + cells[c] + "'");
      }
      row.push_back(v);
    }
    if (label_col) {
      auto v = trim(cells[*label_col]);
      if (v != "0" && v != "1") {
        throw Error("'" + path + "' line " + std::to_string(line_no) + ": label must be 0 or 1, got '" +
                    v + "'");
      }
      gold.push_back(v == "1" ? 1 : 0);
    }
    if (group_col) {
      auto v = trim(cells[*group_col]);
      int g = -1;
      auto res = std::from_chars(v.data(), v.data() + v.size(), g);
      if (res.ec != std::errc() || res.ptr != v.data() + v.size() || g < 0) {
        throw Error("'" + path + "' line " + std::to_string(line_no) +
                    ": group id must be a non-negative integer, got '" + v + "'");
      }
      groups.push_back(g);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("'" + path + "': no data rows");
  if (feature_cols.empty()) throw Error("'" + path + "': no feature columns");

  data.values.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  if (label_col) data.gold_labels = std::move(gold);
  if (group_col) data.group_ids = std::move(groups);
  data.validate();
  return data;
}

void write_csv(const std::string& path, const Dataset& data, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (std::size_t j = 0; j < data.cols(); ++j) {
    if (j) out << ',';
    out << data.feature_names[j];
  }
  if (data.gold_labels) out << ',' << label_column;
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      out << format_double(data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    if (data.gold_labels) out << ',' << (*data.gold_labels)[i];
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Splitting and synthetic data

Split stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error("stratified_split: train fraction must be in (0,1)");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw Error("stratified_split: a class has no samples");

  std::mt19937_64 rng(seed);
  Split split;
  for (auto* cls : {&pos, &neg}) {
    std::shuffle(cls->begin(), cls->end(), rng);
    auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(cls->size())));
    split.train.insert(split.train.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), cls->begin() + static_cast<std::ptrdiff_t>(n_train), cls->end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Dataset generate_synthetic(const Dataset& parent, std::size_t n_irrelevant, std::uint64_t seed) {
  Dataset out = parent;
  if (n_irrelevant == 0) return out;
  const auto n = static_cast<Eigen::Index>(parent.rows());
  const auto d = static_cast<Eigen::Index>(parent.cols());
  out.values.conservativeResize(n, d + static_cast<Eigen::Index>(n_irrelevant));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Column-by-column so that adding more irrelevant features keeps the
  // earlier ones unchanged for the same seed.
  for (std::size_t k = 0; k < n_irrelevant; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) out.values(i, d + static_cast<Eigen::Index>(k)) = normal(rng);
    out.feature_names.push_back("irr_" + std::to_string(k + 1));
  }
  out.validate();
  return out;
}

HicsParent make_hics_like_parent(std::uint64_t seed) {
  constexpr double kRho = 0.95;
  constexpr double kLow = 1.4;
  constexpr double kHigh = 2.3;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Unit-variance latent factor with bounded support, so that normals have no
  // marginal tail for a detector to confuse with the planted anomalies.
  std::uniform_real_distribution<double> latent(-std::sqrt(3.0), std::sqrt(3.0));
  std::uniform_real_distribution<double> magnitude(kLow, kHigh);

  const auto n = static_cast<Eigen::Index>(kHicsSamples);
  HicsParent out;
  out.subspace_2d = {0, 1};
  out.subspace_3d = {2, 3, 4};
  out.dataset.values.resize(n, 5);
  out.dataset.feature_names = {"f1", "f2", "f3", "f4", "f5"};
  out.dataset.gold_features = {0, 1, 2, 3, 4};

  // Each feature = rho * shared factor + noise, unit variance.
  const double noise = std::sqrt(1.0 - kRho * kRho);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = latent(rng);
    for (Eigen::Index j = 0; j < 2; ++j) out.dataset.values(i, j) = kRho * a + noise * normal(rng);
    const double b = latent(rng);
    for (Eigen::Index j = 2; j < 5; ++j) out.dataset.values(i, j) = kRho * b + noise * normal(rng);
  }

  std::vector<std::size_t> order(kHicsSamples);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  Labels gold(kHicsSamples, 0);
  out.anomaly_subspace.assign(kHicsSamples, -1);
  for (std::size_t a = 0; a < kHicsAnomalies; ++a) {
    const auto row = static_cast<Eigen::Index>(order[a]);
    gold[order[a]] = 1;
    if (a < kHicsAnomalies / 2) {
      // Against the positive correlation: high first feature, low second.
      out.dataset.values(row, 0) = magnitude(rng);
      out.dataset.values(row, 1) = -magnitude(rng);
      out.anomaly_subspace[order[a]] = 0;
    } else {
      out.dataset.values(row, 2) = magnitude(rng);
      out.dataset.values(row, 3) = magnitude(rng);
      out.dataset.values(row, 4) = -magnitude(rng);
      out.anomaly_subspace[order[a]] = 1;
    }
  }
  out.dataset.gold_labels = std::move(gold);
  out.dataset.validate();
  return out;
}

}  // namespace proteus
