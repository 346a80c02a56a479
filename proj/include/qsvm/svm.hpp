#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsvm/quant.hpp"
#include "qsvm/sparse.hpp"

namespace qsvm {

struct KernelKind {
  enum class Type { Linear, Rbf };
  Type type = Type::Linear;
  double gamma = 1.0;  // rbf only, > 0

  static KernelKind linear() { return {Type::Linear, 0.0}; }
  static KernelKind rbf(double gamma) { return {Type::Rbf, gamma}; }
};

double kernel_eval(KernelKind kind, SparseView xi, SparseView xj);

struct SmoConfig {
  double c = 1.0;        // box constraint
  double tol = 1e-3;     // KKT violation tolerance
  double eps = 1e-8;     // minimum alpha change counting as progress
  int max_passes = 1;    // zero-progress full sweeps before stopping
  uint64_t seed = 0;     // fallback-loop start positions
};

// Every value produced at a quantization site flows through here: optionally
// recorded into a stats registry, then snapped by the scheme.
struct SitePipe {
  const QuantScheme* scheme = nullptr;
  StatsRegistry* stats = nullptr;

  double operator()(Site site, double value) const {
    if (stats) stats->record(site, value);
    return scheme ? scheme->apply(site, value) : value;
  }
};

struct BinarySvmModel {
  std::vector<SparseVec> support_vectors;
  std::vector<double> sv_alphas;  // all > 0
  std::vector<int8_t> sv_labels;  // +-1
  double bias = 0.0;
  KernelKind kernel;
  // Row indices of the support vectors in the training matrix. Populated by
  // smo_train, not serialized; required by kkt_report.
  std::vector<int32_t> sv_indices;
};

// Sum of alpha_i y_i K(sv_i, x) + b, each kernel output quantized at
// kernel.out and the accumulated result at decision.acc.
double decision_raw(const BinarySvmModel& model, SparseView x, const SitePipe& pipe);

// sgn of decision_raw, with sgn(0) = +1.
int decision(const BinarySvmModel& model, SparseView x, const SitePipe& pipe);

// Final trainer state, exposed for verification.
struct TrainDiag {
  std::vector<double> alpha;
  std::vector<double> err;  // error cache at termination
  double bias = 0.0;
};

BinarySvmModel smo_train(const TfIdfMatrix& features, const std::vector<int8_t>& y,
                         const SmoConfig& config, KernelKind kernel,
                         const SitePipe& pipe, TrainDiag* diag = nullptr);

struct KktReport {
  double max_violation = 0.0;
  int64_t violators = 0;  // examples whose violation exceeds tol
  int64_t examples = 0;
};

// Re-derives each example's KKT violation from the model. The decision values
// run through `pipe`, so a quantized model can be audited under its own
// arithmetic. Needs model.sv_indices (a trained, not deserialized, model).
KktReport kkt_report(const BinarySvmModel& model, const TfIdfMatrix& features,
                     const std::vector<int8_t>& y, const SmoConfig& config,
                     const SitePipe& pipe = {});

// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij over
// the support vectors, exact arithmetic.
double dual_objective(const BinarySvmModel& model);

void save_model(const BinarySvmModel& model, const std::string& path);
BinarySvmModel load_model(const std::string& path);

}  // namespace qsvm
