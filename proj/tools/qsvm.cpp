#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsvm/commands.hpp"
#include "qsvm/config.hpp"
#include "qsvm/error.hpp"

namespace {

// Binds CLI flags over a RunConfig with flag > config file > default
// precedence: only flags the user actually passed overwrite the base config.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON config file (keys mirror flag names)");
  }

  template <typename T>
  void add(const std::string& name, T qsvm::RunConfig::* field, const std::string& desc) {
    auto* opt = app_->add_option(name, flags_.*field, desc);
    appliers_.push_back([this, field, opt](qsvm::RunConfig& out) {
      if (opt->count() > 0) out.*field = flags_.*field;
    });
  }

  void add_flag(const std::string& name, bool qsvm::RunConfig::* field, const std::string& desc) {
    auto* opt = app_->add_flag(name, flags_.*field, desc);
    appliers_.push_back([this, field, opt](qsvm::RunConfig& out) {
      if (opt->count() > 0) out.*field = flags_.*field;
    });
  }

  qsvm::RunConfig resolve() const {
    qsvm::RunConfig base;
    if (!config_path_.empty()) base = qsvm::load_config_file(config_path_);
    for (const auto& apply : appliers_) apply(base);
    return base;
  }

 private:
  CLI::App* app_;
  qsvm::RunConfig flags_;
  std::string config_path_;
  std::vector<std::function<void(qsvm::RunConfig&)>> appliers_;
};

void add_common(FlagSet& fs) {
  fs.add("--dataset", &qsvm::RunConfig::dataset, "training corpus path");
  fs.add("--format", &qsvm::RunConfig::format, "dataset format: r8-lines | webkb-dirs");
  fs.add("--c", &qsvm::RunConfig::c, "SVM box constraint C");
  fs.add("--tol", &qsvm::RunConfig::tol, "KKT tolerance");
  fs.add("--eps", &qsvm::RunConfig::eps, "minimum alpha progress");
  fs.add("--max-passes", &qsvm::RunConfig::max_passes, "zero-progress full sweeps before stop");
  fs.add("--kernel", &qsvm::RunConfig::kernel, "kernel: linear | rbf");
  fs.add("--gamma", &qsvm::RunConfig::gamma, "rbf gamma");
  fs.add("--seed", &qsvm::RunConfig::seed, "random seed");
  fs.add("--jobs", &qsvm::RunConfig::jobs, "parallel class trainings");
}

void add_quant(FlagSet& fs) {
  fs.add("--method", &qsvm::RunConfig::method, "quantization: none | max-magnitude | min-max");
  fs.add("--bits", &qsvm::RunConfig::bits, "total bit width (32 = identity)");
  fs.add("--stats", &qsvm::RunConfig::stats, "site statistics JSON file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qsvm - SVM text classification with simulated fixed-point training.\n"
      "Exit codes: 0 ok; 1 generic; 2 missing file; 3 empty corpus; 4 format;\n"
      "5 unknown class; 6 single class; 7 missing stats; 8 invalid stats;\n"
      "9 model parse; 10 empty evaluation; 11 non-finite value; 12 finalized\n"
      "registry; 13 empty stats pass; 14 dimension mismatch; 15 unknown site;\n"
      "16 invalid argument."};
  app.require_subcommand(1);

  auto* collect = app.add_subcommand("collect-stats",
                                     "exact-arithmetic pre-training pass gathering per-site "
                                     "min/max statistics");
  FlagSet collect_fs(collect);
  add_common(collect_fs);
  collect_fs.add("--stats", &qsvm::RunConfig::stats, "output stats JSON path");
  collect_fs.add("--stats-fraction", &qsvm::RunConfig::stats_fraction,
                 "fraction of the training set to use");

  auto* train = app.add_subcommand("train", "train a one-versus-all model");
  FlagSet train_fs(train);
  add_common(train_fs);
  add_quant(train_fs);
  train_fs.add("--out", &qsvm::RunConfig::out, "output model JSON path");

  auto* predict = app.add_subcommand("predict", "classify documents with a trained model");
  FlagSet predict_fs(predict);
  add_common(predict_fs);
  add_quant(predict_fs);
  predict_fs.add("--model", &qsvm::RunConfig::model, "model JSON path");
  predict_fs.add("--input", &qsvm::RunConfig::input, "documents to classify");
  predict_fs.add("--out", &qsvm::RunConfig::out, "predictions CSV path");

  auto* sweep = app.add_subcommand("sweep", "bit-width versus accuracy sweep");
  FlagSet sweep_fs(sweep);
  add_common(sweep_fs);
  add_quant(sweep_fs);
  sweep_fs.add("--test", &qsvm::RunConfig::test_dataset, "held-out test corpus path");
  sweep_fs.add("--out", &qsvm::RunConfig::out, "results CSV path");
  sweep_fs.add_flag("--timing", &qsvm::RunConfig::timing,
                    "record wall-clock training time (breaks byte reproducibility)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (collect->parsed()) qsvm::cmd_collect_stats(collect_fs.resolve());
    if (train->parsed()) qsvm::cmd_train(train_fs.resolve());
    if (predict->parsed()) qsvm::cmd_predict(predict_fs.resolve());
    if (sweep->parsed()) qsvm::cmd_sweep(sweep_fs.resolve());
  } catch (const qsvm::Error& e) {
    std::cerr << "error: " << qsvm::errc_name(e.code()) << ": " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: Generic: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
