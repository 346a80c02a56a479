#include "qsvm/config.hpp"

#include <fstream>

#include "qsvm/error.hpp"

namespace qsvm {

void apply_config_json(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.is_object()) fail(Errc::InvalidArgument, "config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "dataset") cfg.dataset = value.get<std::string>();
      else if (key == "test_dataset") cfg.test_dataset = value.get<std::string>();
      else if (key == "format") cfg.format = value.get<std::string>();
      else if (key == "input") cfg.input = value.get<std::string>();
      else if (key == "method") cfg.method = value.get<std::string>();
      else if (key == "bits") cfg.bits = value.get<int>();
      else if (key == "c") cfg.c = value.get<double>();
      else if (key == "tol") cfg.tol = value.get<double>();
      else if (key == "eps") cfg.eps = value.get<double>();
      else if (key == "max_passes") cfg.max_passes = value.get<int>();
      else if (key == "kernel") cfg.kernel = value.get<std::string>();
      else if (key == "gamma") cfg.gamma = value.get<double>();
      else if (key == "stats") cfg.stats = value.get<std::string>();
      else if (key == "model") cfg.model = value.get<std::string>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "seed") cfg.seed = value.get<uint64_t>();
      else if (key == "jobs") cfg.jobs = value.get<int>();
      else if (key == "stats_fraction") cfg.stats_fraction = value.get<double>();
      else if (key == "timing") cfg.timing = value.get<bool>();
      else fail(Errc::InvalidArgument, "unknown config key: " + key);
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::InvalidArgument, "bad value for config key " + key + ": " + e.what());
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::MissingFile, "cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidArgument, std::string("malformed config file: ") + e.what());
  }
  RunConfig cfg;
  apply_config_json(cfg, doc);
  return cfg;
}

}  // namespace qsvm
