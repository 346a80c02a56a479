#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "qsvm/error.hpp"
#include "qsvm/svm.hpp"
#include "qp_oracle.hpp"
#include "tiny_problems.hpp"
#include "util.hpp"

using namespace qsvm;
using test::TinyProblem;
using test::dense_matrix;
using test::dense_to_sparse;
using test::kernel_matrix;
using test::random_tiny;

TEST_CASE("kernel evaluation") {
  SparseVec a = dense_to_sparse({1.0, 0.0, 2.0});
  SparseVec b = dense_to_sparse({0.0, 3.0, 0.0});
  SparseVec c = dense_to_sparse({1.0, 1.0, 0.0});
  CHECK(kernel_eval(KernelKind::linear(), a.view(), b.view()) == 0.0);
  CHECK(kernel_eval(KernelKind::linear(), a.view(), c.view()) == 1.0);
  CHECK(kernel_eval(KernelKind::rbf(0.7), a.view(), a.view()) == 1.0);
  // gamma = 0.5, squared distance 2
  SparseVec d = dense_to_sparse({1.0, 0.0});
  SparseVec e = dense_to_sparse({0.0, 1.0});
  CHECK(kernel_eval(KernelKind::rbf(0.5), d.view(), e.view()) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("kernel symmetry and rbf range") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> da(4), db(4);
    for (auto& v : da) v = coord(rng);
    for (auto& v : db) v = coord(rng);
    SparseVec a = dense_to_sparse(da), b = dense_to_sparse(db);
    for (KernelKind k : {KernelKind::linear(), KernelKind::rbf(0.8)}) {
      CHECK(kernel_eval(k, a.view(), b.view()) == kernel_eval(k, b.view(), a.view()));
    }
    double kr = kernel_eval(KernelKind::rbf(0.8), a.view(), b.view());
    CHECK(kr > 0.0);
    CHECK(kr <= 1.0);
  }
}

TEST_CASE("decision_raw hand example") {
  BinarySvmModel m;
  m.kernel = KernelKind::linear();
  m.bias = 0.0;
  m.support_vectors = {dense_to_sparse({-1.0}), dense_to_sparse({1.0})};
  m.sv_alphas = {0.5, 0.5};
  m.sv_labels = {-1, 1};
  SparseVec x = dense_to_sparse({2.0});
  CHECK(decision_raw(m, x.view(), {}) == 2.0);
  CHECK(decision(m, x.view(), {}) == 1);

  BinarySvmModel empty;
  empty.bias = 0.3;
  CHECK(decision_raw(empty, x.view(), {}) == 0.3);

  BinarySvmModel zero;
  CHECK(decision(zero, x.view(), {}) == 1);  // sgn(0) = +1
}

TEST_CASE("two-point analytic solution") {
  TfIdfMatrix x = dense_matrix({{-1.0}, {1.0}});
  std::vector<int8_t> y = {-1, 1};
  SmoConfig cfg;
  cfg.c = 10.0;
  TrainDiag diag;
  BinarySvmModel m = smo_train(x, y, cfg, KernelKind::linear(), {}, &diag);
  REQUIRE(m.sv_alphas.size() == 2);
  CHECK(m.sv_alphas[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(m.sv_alphas[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(m.bias == doctest::Approx(0.0).epsilon(1e-9));
  SparseVec probe = dense_to_sparse({0.7});
  CHECK(decision(m, probe.view(), {}) == 1);
  SparseVec probe2 = dense_to_sparse({-0.2});
  CHECK(decision(m, probe2.view(), {}) == -1);

  KktReport rep = kkt_report(m, x, y, cfg);
  CHECK(rep.violators == 0);
  CHECK(rep.max_violation == 0.0);
}

TEST_CASE("four-point linear problem matches the QP oracle") {
  TfIdfMatrix x = dense_matrix({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}});
  std::vector<int8_t> y = {-1, -1, 1, 1};
  SmoConfig cfg;
  cfg.c = 10.0;
  BinarySvmModel m = smo_train(x, y, cfg, KernelKind::linear(), {});
  // sign flips along the first coordinate
  SparseVec lo = dense_to_sparse({0.0, 0.5});
  SparseVec hi = dense_to_sparse({1.0, 0.5});
  CHECK(decision(m, lo.view(), {}) == -1);
  CHECK(decision(m, hi.view(), {}) == 1);

  test::QpOracle oracle{kernel_matrix({x, y, KernelKind::linear(), cfg.c}), y, cfg.c};
  auto a = oracle.solve();
  CHECK(dual_objective(m) == doctest::Approx(oracle.objective(a)).epsilon(1e-6));
}

TEST_CASE("degenerate inputs") {
  TfIdfMatrix x = dense_matrix({{1.0}, {2.0}});
  CHECK_THROWS_AS(smo_train(x, {1, 1}, {}, KernelKind::linear(), {}), Error);
  CHECK_THROWS_AS(smo_train(x, {1}, {}, KernelKind::linear(), {}), Error);
  CHECK_THROWS_AS(smo_train(TfIdfMatrix(1), {}, {}, KernelKind::linear(), {}), Error);
}

TEST_CASE("oracle equivalence on random tiny problems") {
  // quick version; the acceptance suite runs >= 50 datasets
  for (uint64_t seed = 0; seed < 12; ++seed) {
    TinyProblem p = random_tiny(seed);
    SmoConfig cfg;
    cfg.c = p.c;
    BinarySvmModel m = smo_train(p.x, p.y, cfg, p.kernel, {});
    test::QpOracle oracle{kernel_matrix(p), p.y, p.c};
    auto a = oracle.solve();
    double b = oracle.bias(a);
    CHECK(dual_objective(m) == doctest::Approx(oracle.objective(a)).epsilon(1e-6));
    for (int i = 0; i < p.x.rows(); ++i)
      CHECK(decision(m, p.x.row(i), {}) == oracle.predict(a, b, static_cast<std::size_t>(i)));
  }
}

TEST_CASE("dual feasibility and error cache consistency") {
  for (uint64_t seed = 100; seed < 106; ++seed) {
    TinyProblem p = random_tiny(seed);
    SmoConfig cfg;
    cfg.c = p.c;
    TrainDiag diag;
    BinarySvmModel m = smo_train(p.x, p.y, cfg, p.kernel, {}, &diag);
    double balance = 0.0;
    for (std::size_t i = 0; i < diag.alpha.size(); ++i) {
      CHECK(diag.alpha[i] >= 0.0);
      CHECK(diag.alpha[i] <= cfg.c);
      balance += diag.alpha[i] * p.y[i];
    }
    CHECK(balance == doctest::Approx(0.0).epsilon(1e-12));
    // cached E_i equals f(x_i) - y_i recomputed from scratch (exact scheme)
    for (int i = 0; i < p.x.rows(); ++i) {
      double f = decision_raw(m, p.x.row(i), {});
      CHECK(diag.err[static_cast<std::size_t>(i)] ==
            doctest::Approx(f - p.y[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto data = test::featurized_synthetic(12, 21);
  std::vector<int8_t> y = binarize_labels(data, data.class_set[0]);
  SmoConfig cfg;
  cfg.seed = 42;
  TrainDiag d1, d2;
  BinarySvmModel m1 = smo_train(data.features, y, cfg, KernelKind::linear(), {}, &d1);
  BinarySvmModel m2 = smo_train(data.features, y, cfg, KernelKind::linear(), {}, &d2);
  CHECK(m1.bias == m2.bias);
  REQUIRE(m1.sv_alphas.size() == m2.sv_alphas.size());
  for (std::size_t i = 0; i < m1.sv_alphas.size(); ++i) {
    CHECK(m1.sv_alphas[i] == m2.sv_alphas[i]);
    CHECK(m1.sv_indices[i] == m2.sv_indices[i]);
  }
  CHECK(d1.alpha == d2.alpha);
}

TEST_CASE("quantized training keeps alphas near-feasible and terminates") {
  auto data = test::featurized_synthetic(10, 33);
  std::vector<int8_t> y = binarize_labels(data, data.class_set[1]);

  // stats pass: record during training, then during decision evaluation
  StatsRegistry reg;
  for (double v : data.features.values()) reg.record(Site::Features, v);
  SitePipe rec{nullptr, &reg};
  BinarySvmModel exact = smo_train(data.features, y, {}, KernelKind::linear(), rec);
  for (int i = 0; i < data.features.rows(); ++i)
    decision_raw(exact, data.features.row(i), rec);
  reg.finalize();

  for (QuantMethod method : {QuantMethod::MaxMagnitude, QuantMethod::MinMax}) {
    QuantScheme scheme = QuantScheme::from_stats(method, 8, reg);
    SitePipe pipe{&scheme, nullptr};
    LabeledDataset q = data;
    q.features.map_values([&](double v) { return pipe(Site::Features, v); });
    TrainDiag diag;
    BinarySvmModel m = smo_train(q.features, y, {}, KernelKind::linear(), pipe, &diag);
    SmoConfig defaults;
    double step = scheme.step(Site::Alpha);
    double balance = 0.0;
    int nonzero = 0;
    for (std::size_t i = 0; i < diag.alpha.size(); ++i) {
      CHECK(diag.alpha[i] >= 0.0);
      CHECK(diag.alpha[i] <= defaults.c + step);  // grid snap can overshoot C
      balance += diag.alpha[i] * y[i];
      if (diag.alpha[i] != 0.0) ++nonzero;
    }
    // snapped alphas drift off the sum(alpha_i y_i) = 0 hyperplane, but the
    // drift stays on the alpha grid under max-magnitude quantization
    if (method == QuantMethod::MaxMagnitude)
      CHECK(std::abs(balance / step - std::round(balance / step)) < 1e-6);
    CHECK(std::abs(balance) < defaults.c);
    CHECK(m.sv_alphas.size() == static_cast<std::size_t>(nonzero));
  }
}

TEST_CASE("model file round trip") {
  TfIdfMatrix x = dense_matrix({{-1.0}, {1.0}});
  std::vector<int8_t> y = {-1, 1};
  SmoConfig cfg;
  cfg.c = 10.0;
  BinarySvmModel m = smo_train(x, y, cfg, KernelKind::linear(), {});
  auto p = std::filesystem::temp_directory_path() / "qsvm_test_model.json";
  save_model(m, p.string());
  BinarySvmModel back = load_model(p.string());
  CHECK(back.bias == m.bias);
  CHECK(back.sv_alphas == m.sv_alphas);
  CHECK(back.sv_labels == m.sv_labels);
  REQUIRE(back.support_vectors.size() == m.support_vectors.size());
  CHECK(back.support_vectors[0].idx == m.support_vectors[0].idx);
  CHECK(back.support_vectors[0].val == m.support_vectors[0].val);

  std::ofstream bad(p);
  bad << "{ not json";
  bad.close();
  CHECK_THROWS_AS(load_model(p.string()), Error);
}
