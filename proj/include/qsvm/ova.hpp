#pragma once

#include <string>
#include <vector>

#include "qsvm/corpus.hpp"
#include "qsvm/svm.hpp"

namespace qsvm {

struct OvaModel {
  std::vector<std::string> class_names;
  std::vector<BinarySvmModel> models;  // same order as class_names
};

// One binary SVM per class, class n positive against the rest. Trainings are
// independent; `jobs` > 1 runs them on worker threads with identical results.
OvaModel train_ova(const LabeledDataset& dataset, const SmoConfig& config,
                   KernelKind kernel, const SitePipe& pipe, int jobs = 1);

// argmax over raw scores; ties break to the lowest class index.
std::string predict(const OvaModel& model, SparseView x, const SitePipe& pipe);

// Raw per-class decision values, class order.
std::vector<double> predict_scores(const OvaModel& model, SparseView x, const SitePipe& pipe);

void save_ova(const OvaModel& model, const std::string& path);
OvaModel load_ova(const std::string& path);

}  // namespace qsvm
