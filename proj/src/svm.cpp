#include "qsvm/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "qsvm/error.hpp"
#include "qsvm/model_json.hpp"

namespace qsvm {

double kernel_eval(KernelKind kind, SparseView xi, SparseView xj) {
  switch (kind.type) {
    case KernelKind::Type::Linear:
      return sparse_dot(xi, xj);
    case KernelKind::Type::Rbf:
      return std::exp(-kind.gamma * sparse_sq_dist(xi, xj));
  }
  fail(Errc::InvalidArgument, "bad kernel enum");
}

double decision_raw(const BinarySvmModel& model, SparseView x, const SitePipe& pipe) {
  double acc = 0.0;
  for (std::size_t i = 0; i < model.sv_alphas.size(); ++i) {
    double k = pipe(Site::KernelOut, kernel_eval(model.kernel, model.support_vectors[i].view(), x));
    acc += model.sv_alphas[i] * model.sv_labels[i] * k;
  }
  return pipe(Site::DecisionAcc, acc + model.bias);
}

int decision(const BinarySvmModel& model, SparseView x, const SitePipe& pipe) {
  return decision_raw(model, x, pipe) >= 0.0 ? 1 : -1;
}

namespace {

// Platt-style SMO state machine over one binary problem. The error cache is
// maintained incrementally for every example, not only the non-bound set.
class SmoTrainer {
 public:
  SmoTrainer(const TfIdfMatrix& features, const std::vector<int8_t>& y,
             const SmoConfig& cfg, KernelKind kernel, const SitePipe& pipe)
      : x_(features), y_(y), cfg_(cfg), kernel_(kernel), pipe_(pipe),
        n_(features.rows()), rng_(cfg.seed) {
    alpha_.assign(static_cast<std::size_t>(n_), 0.0);
    err_.resize(static_cast<std::size_t>(n_));
    diag_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      diag_[static_cast<std::size_t>(i)] =
          pipe_(Site::KernelOut, kernel_eval(kernel_, x_.row(i), x_.row(i)));
    // alpha = 0, b = 0 => f(x_i) = 0, E_i = -y_i
    for (int i = 0; i < n_; ++i)
      err_[static_cast<std::size_t>(i)] =
          pipe_(Site::ErrorCache, pipe_(Site::DecisionAcc, 0.0) - y_[static_cast<std::size_t>(i)]);
  }

  void run() {
    // Main optimization, then bias refit + error-cache refresh rounds: the
    // bias carried out of the final two-variable step is only pinned by that
    // step's pair, and under quantization the incrementally maintained cache
    // drifts from freshly computed decisions. Each refit recomputes both from
    // the converged alphas; if the refreshed errors expose new KKT violations
    // the optimization resumes.
    optimize();
    constexpr int kRefitRounds = 4;
    for (int round = 0; round < kRefitRounds; ++round) {
      refit_bias_and_refresh();
      int changed = 0;
      for (int i = 0; i < n_; ++i) changed += examine_example(i);
      if (changed == 0) break;
      optimize();
    }
  }

  BinarySvmModel make_model() const {
    BinarySvmModel m;
    m.kernel = kernel_;
    m.bias = b_;
    for (int i = 0; i < n_; ++i) {
      double a = alpha_[static_cast<std::size_t>(i)];
      if (a <= 0.0) continue;
      SparseView r = x_.row(i);
      SparseVec sv;
      sv.idx.assign(r.idx.begin(), r.idx.end());
      sv.val.assign(r.val.begin(), r.val.end());
      m.support_vectors.push_back(std::move(sv));
      m.sv_alphas.push_back(a);
      m.sv_labels.push_back(y_[static_cast<std::size_t>(i)]);
      m.sv_indices.push_back(i);
    }
    return m;
  }

  TrainDiag diag() const { return {alpha_, err_, b_}; }

 private:
  void optimize() {
    bool examine_all = true;
    int stalled_full_sweeps = 0;
    int rounds = 0;
    constexpr int kRoundCap = 100000;  // oscillation guard under coarse grids
    while (true) {
      int changed = 0;
      for (int i = 0; i < n_; ++i) {
        if (!examine_all && !non_bound(i)) continue;
        changed += examine_example(i);
      }
      if (examine_all) {
        if (changed == 0) {
          if (++stalled_full_sweeps >= cfg_.max_passes) break;
        } else {
          stalled_full_sweeps = 0;
          examine_all = false;
        }
      } else if (changed == 0) {
        examine_all = true;
      }
      if (++rounds >= kRoundCap) break;
    }
  }

  // Recompute each example's bias-free decision value from the current
  // alphas, refit b (pinned by interior alphas; otherwise the midpoint of the
  // interval the bound alphas leave feasible), and rebuild the error cache.
  void refit_bias_and_refresh() {
    std::vector<double> g(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
      double aj = alpha_[static_cast<std::size_t>(j)];
      if (aj <= 0.0) continue;
      double wj = aj * y_[static_cast<std::size_t>(j)];
      for (int i = 0; i < n_; ++i) g[static_cast<std::size_t>(i)] += wj * kq(j, i);
    }

    // bound detection needs slack: a clipped alpha can land a rounding error
    // away from 0 or C and must not pin b as if it were interior
    const double slack = 1e-8 * cfg_.c;
    double interior_sum = 0.0;
    int interior = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i) {
      double gi = g[static_cast<std::size_t>(i)];
      double yi = y_[static_cast<std::size_t>(i)];
      double ai = alpha_[static_cast<std::size_t>(i)];
      bool at_zero = ai <= slack;
      bool at_c = ai >= cfg_.c - slack;
      if (!at_zero && !at_c) {
        interior_sum += yi - gi;
        ++interior;
        continue;
      }
      // y_i (g_i + b) >= 1 at alpha = 0, <= 1 at alpha = C
      if (yi > 0.0)
        (at_zero ? lo : hi) = at_zero ? std::max(lo, 1.0 - gi) : std::min(hi, 1.0 - gi);
      else
        (at_zero ? hi : lo) = at_zero ? std::min(hi, -1.0 - gi) : std::max(lo, -1.0 - gi);
    }
    double b_new;
    if (interior > 0)
      b_new = interior_sum / interior;
    else if (std::isinf(lo))
      b_new = std::isinf(hi) ? 0.0 : hi;
    else if (std::isinf(hi))
      b_new = lo;
    else
      b_new = 0.5 * (lo + hi);

    b_ = pipe_(Site::Bias, b_new);
    for (int i = 0; i < n_; ++i)
      err_[static_cast<std::size_t>(i)] = pipe_(
          Site::ErrorCache, g[static_cast<std::size_t>(i)] + b_ - y_[static_cast<std::size_t>(i)]);
  }

  bool non_bound(int i) const {
    double a = alpha_[static_cast<std::size_t>(i)];
    return a > 0.0 && a < cfg_.c;
  }

  double kq(int i, int j) const {
    if (i == j) return diag_[static_cast<std::size_t>(i)];
    return pipe_(Site::KernelOut, kernel_eval(kernel_, x_.row(i), x_.row(j)));
  }

  int examine_example(int i2) {
    double y2 = y_[static_cast<std::size_t>(i2)];
    double a2 = alpha_[static_cast<std::size_t>(i2)];
    double e2 = err_[static_cast<std::size_t>(i2)];
    double r2 = e2 * y2;
    if (!((r2 < -cfg_.tol && a2 < cfg_.c) || (r2 > cfg_.tol && a2 > 0.0))) return 0;

    // second choice: the non-bound example maximizing |E1 - E2|, i.e. the
    // minimum error when E2 is positive and the maximum otherwise
    int best = -1;
    double best_err = 0.0;
    for (int k = 0; k < n_; ++k) {
      if (k == i2 || !non_bound(k)) continue;
      double ek = err_[static_cast<std::size_t>(k)];
      if (best < 0 || (e2 > 0.0 ? ek < best_err : ek > best_err)) {
        best = k;
        best_err = ek;
      }
    }
    if (best >= 0 && take_step(best, i2)) return 1;

    // sweep the non-bound set from a random start, then the full set
    std::uniform_int_distribution<int> dist(0, n_ - 1);
    int start = dist(rng_);
    for (int off = 0; off < n_; ++off) {
      int k = (start + off) % n_;
      if (k == i2 || !non_bound(k)) continue;
      if (take_step(k, i2)) return 1;
    }
    start = dist(rng_);
    for (int off = 0; off < n_; ++off) {
      int k = (start + off) % n_;
      if (k == i2) continue;
      if (take_step(k, i2)) return 1;
    }
    return 0;
  }

  bool take_step(int i1, int i2) {
    if (i1 == i2) return false;
    double a1 = alpha_[static_cast<std::size_t>(i1)];
    double a2 = alpha_[static_cast<std::size_t>(i2)];
    double y1 = y_[static_cast<std::size_t>(i1)];
    double y2 = y_[static_cast<std::size_t>(i2)];
    double e1 = err_[static_cast<std::size_t>(i1)];
    double e2 = err_[static_cast<std::size_t>(i2)];
    double s = y1 * y2;
    double c = cfg_.c;

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c, c + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c);
      hi = std::min(c, a1 + a2);
    }
    if (lo >= hi) return false;

    double k11 = kq(i1, i1);
    double k12 = kq(i1, i2);
    double k22 = kq(i2, i2);
    double eta = 2.0 * k12 - k11 - k22;

    double a2_new;
    if (eta < 0.0) {
      a2_new = std::clamp(a2 - y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // degenerate curvature: evaluate the dual objective at both clip ends
      double v1 = e1 + y1 - b_ - a1 * y1 * k11 - a2 * y2 * k12;
      double v2 = e2 + y2 - b_ - a1 * y1 * k12 - a2 * y2 * k22;
      auto psi = [&](double t) {
        double a1t = a1 + s * (a2 - t);
        return 0.5 * k11 * a1t * a1t + 0.5 * k22 * t * t + s * k12 * a1t * t +
               y1 * a1t * v1 + y2 * t * v2 - a1t - t;
      };
      double psi_lo = psi(lo);
      double psi_hi = psi(hi);
      if (psi_lo < psi_hi - cfg_.eps)
        a2_new = lo;
      else if (psi_lo > psi_hi + cfg_.eps)
        a2_new = hi;
      else
        a2_new = a2;
    }
    if (std::abs(a2_new - a2) < cfg_.eps * (a2_new + a2 + cfg_.eps)) return false;

    double a1_new = std::clamp(a1 + s * (a2 - a2_new), 0.0, c);
    double a1q = pipe_(Site::Alpha, a1_new);
    double a2q = pipe_(Site::Alpha, a2_new);
    if (a1q == a1 && a2q == a2) return false;  // grid swallowed the update

    double da1 = a1q - a1;
    double da2 = a2q - a2;

    double b1 = b_ - e1 - y1 * da1 * k11 - y2 * da2 * k12;
    double b2 = b_ - e2 - y1 * da1 * k12 - y2 * da2 * k22;
    double b_new;
    if (a1q > 0.0 && a1q < c)
      b_new = b1;
    else if (a2q > 0.0 && a2q < c)
      b_new = b2;
    else
      b_new = (b1 + b2) / 2.0;
    b_new = pipe_(Site::Bias, b_new);
    double db = b_new - b_;

    alpha_[static_cast<std::size_t>(i1)] = a1q;
    alpha_[static_cast<std::size_t>(i2)] = a2q;
    b_ = b_new;

    for (int k = 0; k < n_; ++k) {
      double delta = y1 * da1 * kq(i1, k) + y2 * da2 * kq(i2, k) + db;
      err_[static_cast<std::size_t>(k)] =
          pipe_(Site::ErrorCache, err_[static_cast<std::size_t>(k)] + delta);
    }
    return true;
  }

  const TfIdfMatrix& x_;
  const std::vector<int8_t>& y_;
  SmoConfig cfg_;
  KernelKind kernel_;
  SitePipe pipe_;
  int n_;
  std::mt19937_64 rng_;
  std::vector<double> alpha_;
  std::vector<double> err_;
  std::vector<double> diag_;
  double b_ = 0.0;
};

}  // namespace

BinarySvmModel smo_train(const TfIdfMatrix& features, const std::vector<int8_t>& y,
                         const SmoConfig& config, KernelKind kernel,
                         const SitePipe& pipe, TrainDiag* diag) {
  if (features.rows() == 0) fail(Errc::EmptyCorpus, "no training examples");
  if (features.rows() != static_cast<int>(y.size()))
    fail(Errc::DimensionMismatch, "label count does not match feature rows");
  bool has_pos = false, has_neg = false;
  for (int8_t v : y) (v > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    fail(Errc::SingleClass, "training labels contain a single class");
  if (config.c <= 0.0 || config.tol <= 0.0 || config.eps <= 0.0 || config.max_passes < 1)
    fail(Errc::InvalidArgument, "invalid SMO configuration");
  if (kernel.type == KernelKind::Type::Rbf && kernel.gamma <= 0.0)
    fail(Errc::InvalidArgument, "rbf gamma must be positive");

  SmoTrainer trainer(features, y, config, kernel, pipe);
  trainer.run();
  if (diag) *diag = trainer.diag();
  return trainer.make_model();
}

KktReport kkt_report(const BinarySvmModel& model, const TfIdfMatrix& features,
                     const std::vector<int8_t>& y, const SmoConfig& config,
                     const SitePipe& pipe) {
  if (model.sv_indices.size() != model.sv_alphas.size())
    fail(Errc::InvalidArgument, "kkt_report needs a model with training indices");
  std::vector<double> alpha(static_cast<std::size_t>(features.rows()), 0.0);
  for (std::size_t k = 0; k < model.sv_indices.size(); ++k)
    alpha[static_cast<std::size_t>(model.sv_indices[k])] = model.sv_alphas[k];

  KktReport rep;
  rep.examples = features.rows();
  for (int i = 0; i < features.rows(); ++i) {
    double f = decision_raw(model, features.row(i), pipe);
    double yf = y[static_cast<std::size_t>(i)] * f;
    double a = alpha[static_cast<std::size_t>(i)];
    // same bound slack as training: clipped alphas land a rounding error
    // away from the exact bound
    const double slack = 1e-8 * config.c;
    double violation;
    if (a <= slack)
      violation = std::max(0.0, (1.0 - yf) - config.tol);
    else if (a >= config.c - slack)
      violation = std::max(0.0, (yf - 1.0) - config.tol);
    else
      violation = std::max(0.0, std::abs(yf - 1.0) - config.tol);
    rep.max_violation = std::max(rep.max_violation, violation);
    if (violation > 0.0) ++rep.violators;
  }
  return rep;
}

double dual_objective(const BinarySvmModel& model) {
  double lin = 0.0;
  for (double a : model.sv_alphas) lin += a;
  double quad = 0.0;
  for (std::size_t i = 0; i < model.sv_alphas.size(); ++i)
    for (std::size_t j = 0; j < model.sv_alphas.size(); ++j)
      quad += model.sv_alphas[i] * model.sv_alphas[j] * model.sv_labels[i] *
              model.sv_labels[j] *
              kernel_eval(model.kernel, model.support_vectors[i].view(),
                          model.support_vectors[j].view());
  return lin - 0.5 * quad;
}

namespace {

nlohmann::ordered_json kernel_to_json(KernelKind k) {
  if (k.type == KernelKind::Type::Linear) return {{"type", "linear"}};
  return {{"type", "rbf"}, {"gamma", k.gamma}};
}

KernelKind kernel_from_json(const nlohmann::json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "linear") return KernelKind::linear();
  if (type == "rbf") return KernelKind::rbf(j.at("gamma").get<double>());
  fail(Errc::ModelParse, "unknown kernel type: " + type);
}

}  // namespace

nlohmann::ordered_json model_to_json(const BinarySvmModel& model) {
  nlohmann::ordered_json svs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < model.sv_alphas.size(); ++i) {
    nlohmann::ordered_json feats = nlohmann::ordered_json::array();
    const SparseVec& sv = model.support_vectors[i];
    for (std::size_t k = 0; k < sv.idx.size(); ++k)
      feats.push_back({sv.idx[k], sv.val[k]});
    svs.push_back({{"alpha", model.sv_alphas[i]},
                   {"label", static_cast<int>(model.sv_labels[i])},
                   {"features", std::move(feats)}});
  }
  return {{"version", 1},
          {"kernel", kernel_to_json(model.kernel)},
          {"bias", model.bias},
          {"svs", std::move(svs)}};
}

BinarySvmModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != 1)
      fail(Errc::ModelParse, "unknown model schema version");
    BinarySvmModel m;
    m.kernel = kernel_from_json(j.at("kernel"));
    m.bias = j.at("bias").get<double>();
    for (const auto& sv : j.at("svs")) {
      double alpha = sv.at("alpha").get<double>();
      int label = sv.at("label").get<int>();
      if (alpha <= 0.0 || (label != 1 && label != -1))
        fail(Errc::ModelParse, "invalid support vector entry");
      SparseVec vec;
      for (const auto& f : sv.at("features")) {
        vec.idx.push_back(f.at(0).get<int32_t>());
        vec.val.push_back(f.at(1).get<double>());
      }
      m.support_vectors.push_back(std::move(vec));
      m.sv_alphas.push_back(alpha);
      m.sv_labels.push_back(static_cast<int8_t>(label));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ModelParse, std::string("malformed model: ") + e.what());
  }
}

void save_model(const BinarySvmModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::MissingFile, "cannot write model file: " + path);
  out << model_to_json(model).dump(2) << '\n';
}

BinarySvmModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::MissingFile, "cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ModelParse, std::string("malformed model file: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace qsvm
