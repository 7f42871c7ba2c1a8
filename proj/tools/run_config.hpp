#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "proteus/automl.hpp"
#include "proteus/detectors.hpp"

namespace proteus::cli {

// INI-style run configuration: [section] blocks of key = value lines.
// Lists are comma separated. Missing keys fall back to defaults.
class RunConfig {
 public:
  RunConfig() = default;
  static RunConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::string required(const std::string& key) const;
  std::optional<std::string> optional(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::size_t> counts(const std::string& key, const std::vector<std::size_t>& fallback) const;
  std::vector<std::string> texts(const std::string& key) const;

  // Path relative to the config file's directory unless absolute.
  std::string path(const std::string& key) const;
  std::optional<std::string> optional_path(const std::string& key) const;

 private:
  boost::property_tree::ptree tree_;
  std::string base_dir_;
};

DetectorParams detector_params(const RunConfig& config, std::uint64_t seed);
double anomaly_ratio(const RunConfig& config);
std::vector<SelectorConfig> selectors_from(const RunConfig& config);
std::vector<ClassifierConfig> classifiers_from(const RunConfig& config);
std::vector<std::size_t> ps_values_from(const RunConfig& config);
ExplainOptions explain_options(const RunConfig& config, std::uint64_t seed, int jobs);

}  // namespace proteus::cli
