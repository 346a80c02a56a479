#pragma once

#include <string>
#include <vector>

#include "qsvm/corpus.hpp"
#include "qsvm/ova.hpp"
#include "qsvm/quant.hpp"
#include "qsvm/svm.hpp"

namespace qsvm {

double accuracy(const std::vector<std::string>& predictions,
                const std::vector<std::string>& truth);

struct SweepRow {
  std::string dataset;
  QuantMethod method = QuantMethod::None;
  int bits = 32;
  double accuracy = 0.0;  // fraction in [0, 1]
  double train_seconds = 0.0;
  int64_t doc_count = 0;
};

struct SweepOptions {
  std::vector<QuantMethod> methods = {QuantMethod::MaxMagnitude, QuantMethod::MinMax};
  std::vector<int> bits_list = {32, 16, 8, 7, 6, 5, 4};
  int jobs = 1;
  bool timing = false;  // off by default so CSV bytes are reproducible
};

// One (method, bits) training + evaluation cell. stats may be null only in
// the identity regime.
SweepRow run_cell(const std::string& dataset_name, const LabeledDataset& train,
                  const LabeledDataset& test, QuantMethod method, int bits,
                  const SmoConfig& config, KernelKind kernel,
                  const StatsRegistry* stats, int jobs, bool timing);

// Bit-width sweep over the requested methods. Cells with bits >= 32 collapse
// into a single leading baseline row with method "none".
std::vector<SweepRow> run_sweep(const std::string& dataset_name,
                                const LabeledDataset& train, const LabeledDataset& test,
                                const SmoConfig& config, KernelKind kernel,
                                const StatsRegistry* stats, const SweepOptions& opts);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace qsvm
