#include "qsvm/eval.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "qsvm/error.hpp"

namespace qsvm {

double accuracy(const std::vector<std::string>& predictions,
                const std::vector<std::string>& truth) {
  if (predictions.empty() || truth.empty())
    fail(Errc::EmptyEvaluation, "accuracy over empty prediction list");
  if (predictions.size() != truth.size())
    fail(Errc::DimensionMismatch, "prediction/truth length mismatch");
  int64_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

SweepRow run_cell(const std::string& dataset_name, const LabeledDataset& train,
                  const LabeledDataset& test, QuantMethod method, int bits,
                  const SmoConfig& config, KernelKind kernel,
                  const StatsRegistry* stats, int jobs, bool timing) {
  QuantScheme scheme;
  if (method != QuantMethod::None && bits < 32) {
    if (!stats)
      fail(Errc::MissingStats,
           std::string("quantization method ") + quant_method_name(method) +
               " needs a statistics file");
    scheme = QuantScheme::from_stats(method, bits, *stats);
  }
  SitePipe pipe{&scheme, nullptr};

  LabeledDataset qtrain = train;
  LabeledDataset qtest = test;
  qtrain.features.map_values([&](double v) { return pipe(Site::Features, v); });
  qtest.features.map_values([&](double v) { return pipe(Site::Features, v); });

  auto t0 = std::chrono::steady_clock::now();
  OvaModel model = train_ova(qtrain, config, kernel, pipe, jobs);
  auto t1 = std::chrono::steady_clock::now();

  std::vector<std::string> preds;
  preds.reserve(static_cast<std::size_t>(qtest.features.rows()));
  for (int i = 0; i < qtest.features.rows(); ++i)
    preds.push_back(predict(model, qtest.features.row(i), pipe));

  SweepRow row;
  row.dataset = dataset_name;
  row.method = scheme.is_identity() ? QuantMethod::None : method;
  row.bits = scheme.is_identity() ? 32 : bits;
  row.accuracy = accuracy(preds, qtest.labels);
  row.train_seconds = timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
  row.doc_count = qtest.features.rows();
  return row;
}

std::vector<SweepRow> run_sweep(const std::string& dataset_name,
                                const LabeledDataset& train, const LabeledDataset& test,
                                const SmoConfig& config, KernelKind kernel,
                                const StatsRegistry* stats, const SweepOptions& opts) {
  bool want_baseline = false;
  std::vector<std::pair<QuantMethod, int>> cells;
  for (QuantMethod m : opts.methods) {
    for (int bits : opts.bits_list) {
      if (m == QuantMethod::None || bits >= 32)
        want_baseline = true;
      else
        cells.emplace_back(m, bits);
    }
  }
  std::vector<SweepRow> rows;
  if (want_baseline)
    rows.push_back(run_cell(dataset_name, train, test, QuantMethod::None, 32, config,
                            kernel, stats, opts.jobs, opts.timing));
  for (auto [m, bits] : cells)
    rows.push_back(run_cell(dataset_name, train, test, m, bits, config, kernel, stats,
                            opts.jobs, opts.timing));
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "dataset,method,bits,accuracy_percent,train_seconds,docs\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%.2f,%.3f,%lld\n", r.dataset.c_str(),
                  quant_method_name(r.method), r.bits, r.accuracy * 100.0,
                  r.train_seconds, static_cast<long long>(r.doc_count));
    out += buf;
  }
  return out;
}

}  // namespace qsvm
