#pragma once

#include <string>

#include <json.hpp>

namespace qsvm {

// Every field has a default; config-file values override defaults and are in
// turn overridden by command-line flags.
struct RunConfig {
  std::string dataset;        // training corpus path
  std::string test_dataset;   // held-out test corpus path (sweep)
  std::string format = "r8-lines";
  std::string input;          // documents to classify (predict)
  // empty method = "none" for train/predict, "all" for sweep; bits 0 = 32 for
  // train/predict, the full default bit list for sweep
  std::string method;
  int bits = 0;
  double c = 1.0;
  double tol = 1e-3;
  double eps = 1e-8;
  int max_passes = 1;
  std::string kernel = "linear";
  double gamma = 1.0;
  std::string stats;          // stats file path
  std::string model;          // model file path (predict input)
  std::string out;            // output path
  uint64_t seed = 0;
  int jobs = 1;
  double stats_fraction = 1.0;
  bool timing = false;
};

// Overlays JSON config-file values onto `cfg`; keys mirror the field names.
// Unknown keys are an error.
void apply_config_json(RunConfig& cfg, const nlohmann::json& doc);

RunConfig load_config_file(const std::string& path);

}  // namespace qsvm
