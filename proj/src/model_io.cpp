#include "proteus/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace proteus {

namespace {

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw Error(std::string("model file: missing ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Reads "key value" and returns value.
std::string keyed(std::istream& in, const std::string& key) {
  const std::string line = next_line(in, key.c_str());
  if (line.rfind(key + " ", 0) != 0) throw Error("model file: expected '" + key + "', got '" + line + "'");
  return line.substr(key.size() + 1);
}

std::size_t keyed_count(std::istream& in, const std::string& key) {
  const std::string v = keyed(in, key);
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw Error("model file: bad count for '" + key + "'");
  return static_cast<std::size_t>(n);
}

ClassifierAlgorithm parse_classifier(const std::string& s) {
  if (s == "knn") return ClassifierAlgorithm::Knn;
  if (s == "rf") return ClassifierAlgorithm::RandomForest;
  if (s == "svm") return ClassifierAlgorithm::LinearSvm;
  throw Error("model file: unknown classifier '" + s + "'");
}

}  // namespace

void write_model(std::ostream& out, const SurrogateModel& model) {
  out << kModelMagic << '\n';
  out << "inputs " << model.input_names().size() << '\n';
  for (const auto& name : model.input_names()) out << name << '\n';
  out << "features " << model.features().size() << '\n';
  for (std::size_t f : model.features()) out << f << ' ' << model.input_names()[f] << '\n';
  out << "means";
  for (Eigen::Index j = 0; j < model.scaler().means().size(); ++j) out << ' ' << format_double(model.scaler().means()[j]);
  out << "\nstd_devs";
  for (Eigen::Index j = 0; j < model.scaler().std_devs().size(); ++j) {
    out << ' ' << format_double(model.scaler().std_devs()[j]);
  }
  const ClassifierConfig& c = model.config();
  out << "\nclassifier " << to_string(c.algorithm) << '\n';
  out << "params " << c.k << ' ' << c.n_trees << ' ' << c.min_leaf << ' ' << format_double(c.c) << ' ' << c.epochs
      << '\n';
  model.classifier().write(out);
  out << "end\n";
}

SurrogateModel read_model(std::istream& in) {
  if (next_line(in, "header") != kModelMagic) throw Error("model file: not a PROTEUS-MODEL v1 file");
  const std::size_t d = keyed_count(in, "inputs");
  std::vector<std::string> names(d);
  for (auto& name : names) name = next_line(in, "input name");
  const std::size_t m = keyed_count(in, "features");
  std::vector<std::size_t> features(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::istringstream line(next_line(in, "feature"));
    std::string name;
    if (!(line >> features[j]) || features[j] >= d) throw Error("model file: bad feature index");
    std::getline(line >> std::ws, name);
    if (name != names[features[j]]) throw Error("model file: feature name does not match its index");
  }
  auto read_vector = [&](const std::string& key) {
    std::istringstream line(next_line(in, key.c_str()));
    std::string k;
    line >> k;
    if (k != key) throw Error("model file: expected '" + key + "'");
    Vector v(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
      if (!(line >> v[static_cast<Eigen::Index>(j)])) throw Error("model file: truncated '" + key + "'");
    }
    return v;
  };
  Vector means = read_vector("means");
  Vector stds = read_vector("std_devs");
  for (Eigen::Index j = 0; j < stds.size(); ++j) {
    if (!(stds[j] > 0.0)) throw Error("model file: non-positive standard deviation");
  }

  ClassifierConfig config;
  config.algorithm = parse_classifier(keyed(in, "classifier"));
  {
    std::istringstream line(keyed(in, "params"));
    if (!(line >> config.k >> config.n_trees >> config.min_leaf >> config.c >> config.epochs)) {
      throw Error("model file: bad classifier parameters");
    }
  }
  Classifier clf = Classifier::read(in, config);
  std::string tail;
  in >> tail;
  if (tail != "end") throw Error("model file: missing end marker");
  return SurrogateModel(std::move(names), std::move(features), StandardScaler(std::move(means), std::move(stds)),
                        std::move(clf));
}

void save_model(const std::string& path, const SurrogateModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_model(out, model);
  if (!out) throw Error("cannot write " + path);
}

SurrogateModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_model(in);
}

void write_report(std::ostream& out, const ExplanationReport& report) {
  out << "best_config = " << report.best.id() << '\n';
  out << "selector = " << report.best.selector.id() << '\n';
  out << "classifier = " << report.best.classifier.id() << '\n';
  out << "ps = " << report.best.ps << '\n';
  out << "selected_features = ";
  for (std::size_t j = 0; j < report.selected_names.size(); ++j) out << (j ? "," : "") << report.selected_names[j];
  out << '\n';
  out << "subset_size = " << report.selected.size() << '\n';
  out << "bbc_auc = " << format_double(report.bbc_auc) << '\n';
  out << "cv_auc_uncorrected = " << format_double(report.cv_auc) << '\n';
  out << "folds = " << report.folds << '\n';
  out << "repeats = " << report.repeats << '\n';
  out << "n_train = " << report.n_train << '\n';
  out << "n_anomalies = " << report.n_anomalies << '\n';
  out << "configurations = " << report.table.size() << '\n';
  for (const auto& [ps, fill] : report.fill_rates) {
    out << "fill.ps" << ps << " = requested " << fill.requested << ", accepted " << fill.accepted << ", draws "
        << fill.draws << ", underfilled_anomalies " << fill.underfilled_anomalies << '\n';
  }
  out << "\n[configurations]\n";
  out << "id\tps\tcv_auc\tmean_subset_size\n";
  for (const auto& row : report.table) {
    out << row.id << '\t' << row.ps << '\t' << format_double(row.cv_auc) << '\t'
        << format_double(row.mean_subset_size) << '\n';
  }
}

void save_report(const std::string& path, const ExplanationReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_report(out, report);
  if (!out) throw Error("cannot write " + path);
}

void save_config_table(const std::string& path, const ExplanationReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "id,ps,cv_auc,mean_subset_size\n";
  for (const auto& row : report.table) {
    out << '"' << row.id << "\"," << row.ps << ',' << format_double(row.cv_auc) << ','
        << format_double(row.mean_subset_size) << '\n';
  }
  if (!out) throw Error("cannot write " + path);
}

}  // namespace proteus
