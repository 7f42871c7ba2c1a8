#pragma once

#include <iosfwd>
#include <string>

#include "proteus/automl.hpp"
#include "proteus/classifiers.hpp"

namespace proteus {

inline constexpr const char* kModelMagic = "PROTEUS-MODEL v1";

// Plain-text surrogate: input names, selected features, scaler statistics,
// classifier kind, parameters and learned state.
void write_model(std::ostream& out, const SurrogateModel& model);
SurrogateModel read_model(std::istream& in);

void save_model(const std::string& path, const SurrogateModel& model);
SurrogateModel load_model(const std::string& path);

// key = value lines, then the per-configuration table.
void write_report(std::ostream& out, const ExplanationReport& report);
void save_report(const std::string& path, const ExplanationReport& report);

// id,ps,cv_auc,mean_subset_size
void save_config_table(const std::string& path, const ExplanationReport& report);

}  // namespace proteus
