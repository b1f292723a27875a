#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "phishdet/error.hpp"
#include "phishdet/ml/kernel.hpp"
#include "phishdet/ml/svm.hpp"

using namespace phishdet;

namespace {

std::vector<double> padded(double x0) {
  std::vector<double> x(10, 0.0);
  x[0] = x0;
  return x;
}

// Points labelled by a random hyperplane, keeping only those at distance
// >= 0.1 from it.
Dataset separable(phishdet::Rng& rng, std::size_t n, std::size_t d) {
  std::vector<double> w(d);
  for (double& v : w) v = rng.uniform(-1.0, 1.0);
  double norm = 0.0;
  for (double v : w) norm += v * v;
  norm = std::sqrt(norm);
  const double b = rng.uniform(-0.3, 0.3);
  Dataset data;
  while (data.size() < n) {
    std::vector<double> x(d);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    double s = b;
    for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
    if (std::abs(s) / norm < 0.1) continue;
    const int label = s > 0 ? 1 : 0;
    if (data.size() < 2 && label != static_cast<int>(data.size())) continue;
    data.features.append_row(x);
    data.labels.push_back(label);
  }
  return data;
}

struct DualCheck {
  double gap = 0.0;
  double sum_alpha_y = 0.0;
  bool in_box = true;
};

// Recomputes the dual gradient from the alphas alone and reports the maximal
// violating-pair gap.
DualCheck check_dual(const Dataset& d, const KernelSpec& k, double c, const std::vector<double>& alpha) {
  const std::size_t n = d.size();
  DualCheck out;
  double up = -INFINITY, low = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = d.labels[i] == 1 ? 1.0 : -1.0;
    out.sum_alpha_y += alpha[i] * yi;
    out.in_box = out.in_box && alpha[i] >= 0.0 && alpha[i] <= c;
    double grad = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double yj = d.labels[j] == 1 ? 1.0 : -1.0;
      grad += alpha[j] * yi * yj * kernel_eval(k, d.features.row(i), d.features.row(j));
    }
    const double v = -yi * grad;
    const bool is_up = (yi > 0 && alpha[i] < c) || (yi < 0 && alpha[i] > 0);
    const bool is_low = (yi < 0 && alpha[i] < c) || (yi > 0 && alpha[i] > 0);
    if (is_up) up = std::max(up, v);
    if (is_low) low = std::min(low, v);
  }
  out.gap = up - low;
  return out;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::Io;
}

}  // namespace

TEST_CASE("kernel names and defaults") {
  for (KernelKind k : {KernelKind::linear, KernelKind::polynomial, KernelKind::rbf, KernelKind::sigmoid})
    CHECK(parse_kernel_kind(to_string(k)) == k);
  CHECK(parse_kernel_kind("polynomial") == KernelKind::polynomial);
  CHECK_FALSE(parse_kernel_kind("cubic"));
  const KernelSpec poly = KernelSpec::defaults(KernelKind::polynomial);
  CHECK(poly.degree == 3);
  CHECK(poly.gamma == 0.1);
  CHECK(poly.coef0 == 1.0);
  CHECK(KernelSpec::defaults(KernelKind::sigmoid).coef0 == 0.0);
  CHECK(KernelSpec::defaults(KernelKind::rbf).gamma == 0.1);
  KernelSpec bad = KernelSpec::rbf(0.0);
  CHECK(code_of([&] { bad.validate(); }) == Errc::InvalidHyperparameter);
  bad = KernelSpec::polynomial(0);
  CHECK(code_of([&] { bad.validate(); }) == Errc::InvalidHyperparameter);
}

TEST_CASE("kernel values") {
  const std::vector<double> a{1, 2}, b{3, 4};
  CHECK(kernel_eval(KernelSpec::linear(), a, b) == 11.0);
  const std::vector<double> u{1, 0}, v{1, 5};
  CHECK(kernel_eval(KernelSpec::polynomial(3, 1.0, 1.0), u, v) == 8.0);
  CHECK(kernel_eval(KernelSpec::sigmoid(0.5, 0.25), a, b) == doctest::Approx(std::tanh(5.75)));
  CHECK(kernel_eval(KernelSpec::rbf(0.2), a, b) == doctest::Approx(std::exp(-0.2 * 8.0)));
  phishdet::Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(10);
    for (double& e : x) e = rng.uniform(-3.0, 3.0);
    CHECK(kernel_eval(KernelSpec::rbf(rng.uniform(0.01, 5.0)), x, x) == 1.0);
  }
  CHECK(code_of([&] { kernel_eval(KernelSpec::linear(), a, std::vector<double>{1.0}); }) == Errc::DimensionMismatch);
  CHECK(kernel_from_dot(KernelSpec::polynomial(3, 1.0, 1.0), 1.0) == 8.0);
  CHECK(kernel_from_distance(KernelSpec::rbf(0.5), 2.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("gram matrices are symmetric positive semi-definite") {
  phishdet::Rng rng(2);
  const KernelSpec kernels[] = {KernelSpec::linear(), KernelSpec::polynomial(3, 0.1, 1.0), KernelSpec::polynomial(2, 0.7, 0.0),
                                KernelSpec::rbf(0.1), KernelSpec::rbf(3.0)};
  for (const KernelSpec& k : kernels) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 2 + rng.below(7);
      Matrix pts(n, 10);
      for (double& v : pts.values()) v = rng.uniform(-2.0, 2.0);
      Eigen::MatrixXd g(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = kernel_eval(k, pts.row(i), pts.row(j));
      CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
      CAPTURE(to_string(k.kind));
      CHECK(es.eigenvalues().minCoeff() > -1e-8);
    }
  }
}

TEST_CASE("symmetric two-point problem") {
  Dataset d;
  d.features.append_row(padded(-1.0));
  d.features.append_row(padded(1.0));
  d.labels = {0, 1};
  SvmTrainOptions o;
  o.kernel = KernelSpec::linear();
  o.c_penalty = 1000.0;
  SvmTrainReport rep;
  const SvmModel m = svm_train(d, o, &rep);
  REQUIRE(rep.alphas.size() == 2);
  CHECK(rep.alphas[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.alphas[0] == rep.alphas[1]);
  CHECK(std::abs(m.bias) < 1e-12);
  CHECK(std::abs(svm_decision(m, padded(0.0))) < 1e-12);
  CHECK(svm_decision(m, padded(1.0)) == doctest::Approx(1.0));
  CHECK(svm_predict(m, padded(0.5)) == 1);
  CHECK(svm_predict(m, padded(-0.5)) == 0);
  CHECK(m.converged);
}

TEST_CASE("40-point separable sets") {
  phishdet::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = separable(rng, 40, 10);
    SvmTrainOptions o;
    o.kernel = KernelSpec::linear();
    o.c_penalty = 100.0;
    SvmTrainReport rep;
    const SvmModel m = svm_train(d, o, &rep);
    CAPTURE(trial);
    CHECK(rep.converged);
    CHECK(rep.kkt_gap < 1e-3);
    const DualCheck dc = check_dual(d, o.kernel, o.c_penalty, rep.alphas);
    CHECK(dc.in_box);
    CHECK(dc.gap < 1e-3);
    CHECK(std::abs(dc.sum_alpha_y) < 1e-6);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(svm_predict(m, d.features.row(i)) == d.labels[i]);
      CHECK((svm_decision(m, d.features.row(i)) >= 0.0) == (d.labels[i] == 1));
    }
    std::size_t sv = 0;
    for (double a : rep.alphas) sv += a > 1e-8;
    CHECK(m.alphas.size() == sv);
    CHECK(m.support_vectors.rows() == sv);
  }
}

TEST_CASE("nonlinear kernels satisfy the dual constraints") {
  phishdet::Rng rng(4);
  const Dataset d = test::random_dataset(rng, 60, 10);
  for (KernelKind k : {KernelKind::polynomial, KernelKind::rbf, KernelKind::sigmoid}) {
    SvmTrainOptions o;
    o.kernel = KernelSpec::defaults(k);
    SvmTrainReport rep;
    svm_train(d, o, &rep);
    CAPTURE(to_string(k));
    CHECK(rep.converged);
    const DualCheck dc = check_dual(d, o.kernel, o.c_penalty, rep.alphas);
    CHECK(dc.in_box);
    CHECK(dc.gap < o.tol);
    CHECK(std::abs(dc.sum_alpha_y) < 1e-6);
  }
}

TEST_CASE("a tiny kernel cache gives the same solution") {
  phishdet::Rng rng(5);
  const Dataset d = test::random_dataset(rng, 80, 10);
  SvmTrainOptions big;
  big.kernel = KernelSpec::rbf(0.1);
  SvmTrainOptions small = big;
  small.cache_bytes = 1;
  CHECK(svm_train(d, big) == svm_train(d, small));
}

TEST_CASE("iteration cap returns an unconverged model") {
  phishdet::Rng rng(6);
  const Dataset d = test::random_dataset(rng, 60, 10);
  SvmTrainOptions o;
  o.max_iterations = 2;
  SvmTrainReport rep;
  const SvmModel m = svm_train(d, o, &rep);
  CHECK_FALSE(m.converged);
  CHECK_FALSE(rep.converged);
  CHECK(m.iterations == 2);
}

TEST_CASE("decision rule") {
  SvmModel m;
  m.support_vectors = Matrix(0, 10);
  const std::vector<double> x(10, 1.0);
  m.bias = 0.0;
  CHECK(svm_decision(m, x) == 0.0);
  CHECK(svm_predict(m, x) == 1);
  m.bias = -3.2;
  CHECK(svm_decision(m, x) == -3.2);
  CHECK(svm_predict(m, x) == 0);
  m.bias = 0.1;
  CHECK(svm_predict(m, x) == 1);
}

TEST_CASE("training errors") {
  Dataset d;
  d.features.append_row(padded(1.0));
  d.features.append_row(padded(2.0));
  d.labels = {1, 1};
  CHECK(code_of([&] { svm_train(d, {}); }) == Errc::SingleClassData);
  d.labels = {0, 1};
  SvmTrainOptions o;
  o.c_penalty = 0.0;
  CHECK(code_of([&] { svm_train(d, o); }) == Errc::InvalidHyperparameter);
  const SvmModel m = svm_train(d, {});
  CHECK(code_of([&] { svm_decision(m, std::vector<double>(3, 0.0)); }) == Errc::DimensionMismatch);
}
