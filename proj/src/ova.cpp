#include "qsvm/ova.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "qsvm/error.hpp"
#include "qsvm/model_json.hpp"

namespace qsvm {

OvaModel train_ova(const LabeledDataset& dataset, const SmoConfig& config,
                   KernelKind kernel, const SitePipe& pipe, int jobs) {
  const std::size_t n_classes = dataset.class_set.size();
  if (n_classes < 2) fail(Errc::SingleClass, "one-versus-all needs at least 2 classes");
  if (jobs < 1) jobs = 1;

  OvaModel out;
  out.class_names = dataset.class_set;
  out.models.resize(n_classes);

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    while (true) {
      std::size_t c = next.fetch_add(1);
      if (c >= n_classes) return;
      try {
        std::vector<int8_t> y = binarize_labels(dataset, dataset.class_set[c]);
        SmoConfig cfg = config;
        cfg.seed = config.seed + c;  // per-class stream, scheduling independent
        out.models[c] = smo_train(dataset.features, y, cfg, kernel, pipe);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

std::vector<double> predict_scores(const OvaModel& model, SparseView x, const SitePipe& pipe) {
  std::vector<double> scores;
  scores.reserve(model.models.size());
  for (const auto& m : model.models) scores.push_back(decision_raw(m, x, pipe));
  return scores;
}

std::string predict(const OvaModel& model, SparseView x, const SitePipe& pipe) {
  std::vector<double> scores = predict_scores(model, x, pipe);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;  // strict: ties keep the lowest index
  return model.class_names[best];
}

void save_ova(const OvaModel& model, const std::string& path) {
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (const auto& m : model.models) models.push_back(model_to_json(m));
  nlohmann::ordered_json doc = {{"version", 1},
                                {"classes", model.class_names},
                                {"models", std::move(models)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::MissingFile, "cannot write model file: " + path);
  out << doc.dump(2) << '\n';
}

OvaModel load_ova(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::MissingFile, "cannot open model file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ModelParse, std::string("malformed model file: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != 1)
      fail(Errc::ModelParse, "unknown model schema version");
    OvaModel m;
    m.class_names = doc.at("classes").get<std::vector<std::string>>();
    for (const auto& mj : doc.at("models")) m.models.push_back(model_from_json(mj));
    if (m.class_names.size() != m.models.size() || m.models.size() < 2)
      fail(Errc::ModelParse, "class/model count mismatch");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ModelParse, std::string("malformed model file: ") + e.what());
  }
}

}  // namespace qsvm
