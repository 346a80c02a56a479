#include "qsvm/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>

#include "qsvm/corpus.hpp"
#include "qsvm/error.hpp"
#include "qsvm/eval.hpp"
#include "qsvm/ova.hpp"

namespace fs = std::filesystem;

namespace qsvm {
namespace {

SmoConfig smo_from_cfg(const RunConfig& cfg) {
  SmoConfig s;
  s.c = cfg.c;
  s.tol = cfg.tol;
  s.eps = cfg.eps;
  s.max_passes = cfg.max_passes;
  s.seed = cfg.seed;
  return s;
}

KernelKind kernel_from_cfg(const RunConfig& cfg) {
  if (cfg.kernel == "linear") return KernelKind::linear();
  if (cfg.kernel == "rbf") return KernelKind::rbf(cfg.gamma);
  fail(Errc::InvalidArgument, "unknown kernel: " + cfg.kernel);
}

std::vector<std::vector<std::string>> tokenize_all(const std::vector<RawDocument>& docs) {
  std::vector<std::vector<std::string>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(preprocess(d.text));
  return out;
}

QuantScheme scheme_from_cfg(const RunConfig& cfg) {
  QuantMethod method =
      cfg.method.empty() ? QuantMethod::None : quant_method_from_name(cfg.method);
  int bits = cfg.bits == 0 ? 32 : cfg.bits;
  if (method == QuantMethod::None || bits >= 32) return QuantScheme::identity();
  if (cfg.stats.empty() || !fs::exists(cfg.stats))
    fail(Errc::MissingStats, "quantized run needs a stats file (--stats)");
  StatsRegistry reg = StatsRegistry::load(cfg.stats);
  return QuantScheme::from_stats(method, bits, reg);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::MissingFile, "cannot write output file: " + path);
  out << content;
}

}  // namespace

void cmd_collect_stats(const RunConfig& cfg) {
  if (cfg.dataset.empty()) fail(Errc::InvalidArgument, "collect-stats needs --dataset");
  if (cfg.out.empty() && cfg.stats.empty())
    fail(Errc::InvalidArgument, "collect-stats needs an output path (--stats)");
  if (!(cfg.stats_fraction > 0.0))
    fail(Errc::EmptyStatsPass, "stats fraction must be positive");

  std::vector<RawDocument> docs = load_dataset(cfg.dataset, parse_dataset_format(cfg.format));
  std::size_t take = std::min(
      docs.size(),
      static_cast<std::size_t>(std::ceil(cfg.stats_fraction * static_cast<double>(docs.size()))));
  if (take == 0) fail(Errc::EmptyStatsPass, "stats pass selected zero documents");
  if (take < docs.size()) {
    std::vector<std::size_t> order(docs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(take);
    std::sort(order.begin(), order.end());
    std::vector<RawDocument> subset;
    subset.reserve(take);
    for (std::size_t i : order) subset.push_back(std::move(docs[i]));
    docs = std::move(subset);
  }

  auto tokenized = tokenize_all(docs);
  Vocabulary vocab = build_vocabulary(tokenized);
  LabeledDataset dataset = featurize(docs, vocab);

  StatsRegistry reg;
  for (double v : dataset.features.values()) reg.record(Site::Features, v);
  SitePipe pipe{nullptr, &reg};  // exact arithmetic, record everything
  OvaModel model = train_ova(dataset, smo_from_cfg(cfg), kernel_from_cfg(cfg), pipe, cfg.jobs);
  // decision pass over the same subset: training alone only exercises the
  // decision accumulator at its zero initialization
  for (int i = 0; i < dataset.features.rows(); ++i)
    predict_scores(model, dataset.features.row(i), pipe);
  reg.finalize();
  reg.save(cfg.stats.empty() ? cfg.out : cfg.stats);
}

void cmd_train(const RunConfig& cfg) {
  if (cfg.dataset.empty()) fail(Errc::InvalidArgument, "train needs --dataset");
  if (cfg.out.empty()) fail(Errc::InvalidArgument, "train needs --out");

  std::vector<RawDocument> docs = load_dataset(cfg.dataset, parse_dataset_format(cfg.format));
  auto tokenized = tokenize_all(docs);
  Vocabulary vocab = build_vocabulary(tokenized);
  LabeledDataset dataset = featurize(docs, vocab);

  QuantScheme scheme = scheme_from_cfg(cfg);
  SitePipe pipe{&scheme, nullptr};
  dataset.features.map_values([&](double v) { return pipe(Site::Features, v); });

  OvaModel model = train_ova(dataset, smo_from_cfg(cfg), kernel_from_cfg(cfg), pipe, cfg.jobs);
  save_ova(model, cfg.out);
}

void cmd_predict(const RunConfig& cfg) {
  if (cfg.dataset.empty())
    fail(Errc::InvalidArgument, "predict needs --dataset (training corpus, vocabulary source)");
  if (cfg.model.empty()) fail(Errc::InvalidArgument, "predict needs --model");
  if (cfg.input.empty()) fail(Errc::InvalidArgument, "predict needs --input");
  if (cfg.out.empty()) fail(Errc::InvalidArgument, "predict needs --out");

  std::vector<RawDocument> train_docs =
      load_dataset(cfg.dataset, parse_dataset_format(cfg.format));
  Vocabulary vocab = build_vocabulary(tokenize_all(train_docs));

  OvaModel model = load_ova(cfg.model);
  for (const auto& m : model.models)
    for (const auto& sv : m.support_vectors)
      for (int32_t col : sv.idx)
        if (col >= vocab.size())
          fail(Errc::DimensionMismatch,
               "model references feature columns beyond the vocabulary; wrong training corpus?");

  std::vector<RawDocument> input_docs =
      load_dataset(cfg.input, parse_dataset_format(cfg.format));
  LabeledDataset input = featurize(input_docs, vocab);

  QuantScheme scheme = scheme_from_cfg(cfg);
  SitePipe pipe{&scheme, nullptr};
  input.features.map_values([&](double v) { return pipe(Site::Features, v); });

  std::string csv = "doc_id,predicted,truth\n";
  for (int i = 0; i < input.features.rows(); ++i) {
    csv += std::to_string(i);
    csv += ',';
    csv += predict(model, input.features.row(i), pipe);
    csv += ',';
    csv += input.labels[static_cast<std::size_t>(i)];
    csv += '\n';
  }
  write_text_file(cfg.out, csv);
}

void cmd_sweep(const RunConfig& cfg) {
  if (cfg.dataset.empty() || cfg.test_dataset.empty())
    fail(Errc::InvalidArgument, "sweep needs --dataset and --test");
  if (cfg.out.empty()) fail(Errc::InvalidArgument, "sweep needs --out");

  DatasetFormat format = parse_dataset_format(cfg.format);
  std::vector<RawDocument> train_docs = load_dataset(cfg.dataset, format);
  std::vector<RawDocument> test_docs = load_dataset(cfg.test_dataset, format);
  Vocabulary vocab = build_vocabulary(tokenize_all(train_docs));
  LabeledDataset train = featurize(train_docs, vocab);
  LabeledDataset test = featurize(test_docs, vocab);

  SweepOptions opts;
  opts.jobs = cfg.jobs;
  opts.timing = cfg.timing;
  if (!cfg.method.empty() && cfg.method != "all")
    opts.methods = {quant_method_from_name(cfg.method)};
  if (cfg.bits != 0) opts.bits_list = {cfg.bits};

  std::optional<StatsRegistry> stats;
  if (!cfg.stats.empty() && fs::exists(cfg.stats)) stats = StatsRegistry::load(cfg.stats);

  std::vector<SweepRow> rows =
      run_sweep(fs::path(cfg.dataset).stem().string(), train, test, smo_from_cfg(cfg),
                kernel_from_cfg(cfg), stats ? &*stats : nullptr, opts);
  write_text_file(cfg.out, sweep_to_csv(rows));
}

}  // namespace qsvm
