#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "phishdet/error.hpp"
#include "phishdet/ml/ann.hpp"
#include "phishdet/ml/logistic.hpp"
#include "phishdet/simd/kernels.hpp"

using namespace phishdet;

namespace {

std::vector<double> flatten(const std::vector<AnnLayer>& layers) {
  std::vector<double> out;
  for (const AnnLayer& l : layers) {
    out.insert(out.end(), l.weights.values().begin(), l.weights.values().end());
    out.insert(out.end(), l.biases.begin(), l.biases.end());
  }
  return out;
}

// Pointer to the k-th parameter in flatten() order.
double& param(AnnModel& m, std::size_t k) {
  for (AnnLayer& l : m.layers) {
    if (k < l.weights.values().size()) return l.weights.values()[k];
    k -= l.weights.values().size();
    if (k < l.biases.size()) return l.biases[k];
    k -= l.biases.size();
  }
  throw std::out_of_range("param");
}

Dataset xor_data() {
  Dataset d;
  const int pts[4][3] = {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  for (const auto& p : pts) {
    std::vector<double> row(10, 0.0);
    row[0] = p[0];
    row[1] = p[1];
    d.features.append_row(row);
    d.labels.push_back(p[2]);
  }
  return d;
}

double sum_sq_weights(const AnnModel& m) {
  double s = 0.0;
  for (const AnnLayer& l : m.layers)
    for (double w : l.weights.values()) s += w * w;
  return s;
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

TEST_CASE("activation names") {
  for (Activation a : {Activation::relu, Activation::tanh, Activation::sigmoid}) CHECK(parse_activation(to_string(a)) == a);
  CHECK_FALSE(parse_activation("softmax"));
}

TEST_CASE("initialization") {
  const std::vector<std::size_t> sizes{10, 7, 3, 1};
  const AnnModel m = ann_init(sizes, Activation::tanh, 9);
  REQUIRE(m.layers.size() == 3);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(m.layers[l].weights.rows() == sizes[l]);
    CHECK(m.layers[l].weights.cols() == sizes[l + 1]);
    CHECK(m.layers[l].biases == std::vector<double>(sizes[l + 1], 0.0));
    for (double w : m.layers[l].weights.values()) {
      CHECK(w >= -0.5);
      CHECK(w <= 0.5);
    }
  }
  CHECK(m == ann_init(sizes, Activation::tanh, 9));
  CHECK_FALSE(m == ann_init(sizes, Activation::tanh, 10));
  const std::vector<std::size_t> two_out{10, 2};
  CHECK(code_of([&] { ann_init(two_out, Activation::relu, 0); }) == Errc::InvalidHyperparameter);
  const std::vector<std::size_t> empty_hidden{10, 0, 1};
  CHECK(code_of([&] { ann_init(empty_hidden, Activation::relu, 0); }) == Errc::InvalidHyperparameter);
}

TEST_CASE("zero network outputs one half") {
  const std::vector<std::size_t> sizes{10, 5, 1};
  AnnModel m = ann_init(sizes, Activation::sigmoid, 1);
  for (AnnLayer& l : m.layers) std::fill(l.weights.values().begin(), l.weights.values().end(), 0.0);
  const std::vector<double> x(10, 3.0);
  CHECK(ann_output(m, x) == 0.5);
  CHECK(ann_predict(m, x) == 0);
}

TEST_CASE("hand-computed forward pass") {
  // x = (1, 2)
  // hidden z = (1*1 + 2*2 + 0.5, 1*-1 + 2*0.5 - 1) = (5.5, -1) -> relu (5.5, 0)
  // output z = 0.2*5.5 + 3*0 - 1 = 0.1 -> sigmoid(0.1)
  const std::vector<std::size_t> sizes{2, 2, 1};
  AnnModel m = ann_init(sizes, Activation::relu, 0);
  m.layers[0].weights(0, 0) = 1.0;
  m.layers[0].weights(0, 1) = -1.0;
  m.layers[0].weights(1, 0) = 2.0;
  m.layers[0].weights(1, 1) = 0.5;
  m.layers[0].biases = {0.5, -1.0};
  m.layers[1].weights(0, 0) = 0.2;
  m.layers[1].weights(1, 0) = 3.0;
  m.layers[1].biases = {-1.0};
  const std::vector<double> x{1.0, 2.0};
  const AnnForward f = ann_forward(m, x);
  REQUIRE(f.activations.size() == 3);
  CHECK(f.activations[1][0] == doctest::Approx(5.5).epsilon(1e-15));
  CHECK(f.activations[1][1] == 0.0);
  CHECK(std::abs(f.output - 1.0 / (1.0 + std::exp(-0.1))) < 1e-12);
  CHECK(f.activations[2][0] == f.output);
  CHECK(code_of([&] { ann_forward(m, std::vector<double>(3, 0.0)); }) == Errc::DimensionMismatch);
}

TEST_CASE("relu activations are non-negative") {
  phishdet::Rng rng(2);
  const std::vector<std::size_t> sizes{10, 8, 6, 1};
  const AnnModel m = ann_init(sizes, Activation::relu, 3);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(10);
    for (double& v : x) v = rng.uniform(-3.0, 3.0);
    const AnnForward f = ann_forward(m, x);
    for (std::size_t l = 1; l + 1 < f.activations.size(); ++l)
      for (double a : f.activations[l]) CHECK(a >= 0.0);
    CHECK(f.output > 0.0);
    CHECK(f.output < 1.0);
    CHECK(ann_predict(m, x) == (f.output > 0.5 ? 1 : 0));
  }
}

TEST_CASE("cost closed forms") {
  phishdet::Rng rng(3);
  const Dataset d = test::random_dataset(rng, 12, 10);
  const std::vector<std::size_t> sizes{10, 4, 1};
  AnnModel zero = ann_init(sizes, Activation::tanh, 0);
  for (AnnLayer& l : zero.layers) std::fill(l.weights.values().begin(), l.weights.values().end(), 0.0);
  CHECK(ann_cost(zero, d) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  AnnModel m = ann_init(sizes, Activation::tanh, 5);
  m.lambda = 0.3;
  const double c1 = ann_cost(m, d);
  m.lambda = 0.6;
  const double c2 = ann_cost(m, d);
  CHECK(c2 - c1 == doctest::Approx(0.3 / (2.0 * 12.0) * sum_sq_weights(m)).epsilon(1e-12));

  // Perfectly confident network: only the penalty remains.
  Dataset both;
  both.features.append_row(std::vector<double>(10, 1.0));
  both.features.append_row(std::vector<double>(10, -1.0));
  both.labels = {1, 0};
  AnnModel sure = ann_init(sizes, Activation::tanh, 0);
  for (AnnLayer& l : sure.layers) std::fill(l.weights.values().begin(), l.weights.values().end(), 0.0);
  sure.layers[0].weights(0, 0) = 1.0;
  sure.layers[1].weights(0, 0) = 1000.0;
  sure.lambda = 0.5;
  const double penalty = 0.5 / (2.0 * 2.0) * (1.0 + 1000.0 * 1000.0);
  CHECK(ann_cost(sure, both) == doctest::Approx(penalty + kProbabilityClamp).epsilon(1e-9));
}

TEST_CASE("backprop matches central differences for every activation") {
  phishdet::Rng rng(4);
  int configs = 0;
  for (Activation act : {Activation::relu, Activation::tanh, Activation::sigmoid}) {
    for (int trial = 0; trial < 8; ++trial, ++configs) {
      std::vector<std::size_t> sizes{10, 5, 1};
      if (trial % 2 == 1) sizes = {10, 4 + rng.below(4), 3, 1};
      const Dataset d = test::random_dataset(rng, 6 + rng.below(20), 10);
      AnnModel m = ann_init(sizes, act, 100 + configs);
      for (AnnLayer& l : m.layers)
        for (double& b : l.biases) b = rng.uniform(-0.3, 0.3);
      m.lambda = trial % 3 == 0 ? 0.0 : rng.uniform(0.0, 1.0);
      const auto analytic = flatten(ann_gradient(m, d));
      std::vector<double> numeric(analytic.size());
      const double h = 1e-5;
      for (std::size_t k = 0; k < numeric.size(); ++k) {
        AnnModel p = m, q = m;
        param(p, k) += h;
        param(q, k) -= h;
        numeric[k] = (ann_cost(p, d) - ann_cost(q, d)) / (2 * h);
      }
      CAPTURE(to_string(act));
      CAPTURE(trial);
      CHECK(test::max_rel_error(analytic, numeric) < 1e-5);
    }
  }
  CHECK(configs >= 20);
}

TEST_CASE("xor is learned by one relu hidden layer") {
  const Dataset d = xor_data();
  AnnTrainOptions o;
  o.layer_sizes = {10, 16, 1};
  o.activation = Activation::relu;
  o.learning_rate = 0.5;
  o.epochs = 5000;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    o.rng_seed = seed;
    const AnnModel m = ann_train(d, o);
    CAPTURE(seed);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(ann_predict(m, d.features.row(i)) == d.labels[i]);
  }
}

TEST_CASE("training is bit-for-bit deterministic") {
  phishdet::Rng rng(6);
  const Dataset d = test::random_dataset(rng, 40, 10);
  AnnTrainOptions o;
  o.layer_sizes = {10, 6, 1};
  o.epochs = 50;
  o.rng_seed = 77;
  CHECK(ann_train(d, o) == ann_train(d, o));
}

TEST_CASE("training equals plain full-batch descent") {
  // Duplicated rows exercise the pattern compression inside ann_train.
  phishdet::Rng rng(7);
  Dataset d;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> row(10);
    for (double& v : row) v = static_cast<double>(rng.below(2));
    const int label = i < 2 ? i : static_cast<int>(rng.below(2));
    for (int rep = 0, n = 1 + static_cast<int>(rng.below(3)); rep < n; ++rep) {
      d.features.append_row(row);
      d.labels.push_back(label);
    }
  }
  d.features.append_row(d.features.row(0));
  d.labels.push_back(1 - d.labels[0]);

  for (double lambda : {0.0, 0.8}) {
    AnnTrainOptions o;
    o.layer_sizes = {10, 5, 3, 1};
    o.activation = Activation::tanh;
    o.lambda = lambda;
    o.learning_rate = 0.2;
    o.epochs = 25;
    o.rng_seed = 3;
    std::vector<double> history;
    const AnnModel trained = ann_train(d, o, &history);

    AnnModel ref = ann_init(o.layer_sizes, o.activation, o.rng_seed);
    const double shrink = 1.0 / (1.0 + o.learning_rate * lambda / static_cast<double>(d.size()));
    for (int e = 0; e < o.epochs; ++e) {
      const auto g = ann_gradient(ref, d);  // lambda 0 here: data term only
      for (std::size_t l = 0; l < ref.layers.size(); ++l) {
        auto w = ref.layers[l].weights.values();
        for (std::size_t t = 0; t < w.size(); ++t) w[t] = (w[t] - o.learning_rate * g[l].weights.values()[t]) * shrink;
        for (std::size_t t = 0; t < ref.layers[l].biases.size(); ++t) ref.layers[l].biases[t] -= o.learning_rate * g[l].biases[t];
      }
    }
    ref.lambda = lambda;
    CHECK(test::max_rel_error(flatten(trained.layers), flatten(ref.layers)) < 1e-12);
    REQUIRE(history.size() == 25);
    CHECK(history.back() == doctest::Approx(ann_cost(ref, d)).epsilon(1e-10));
  }
}

TEST_CASE("cost is non-increasing at the default learning rate") {
  phishdet::Rng rng(8);
  const Dataset d = test::random_dataset(rng, 80, 10);
  for (Activation act : {Activation::relu, Activation::tanh, Activation::sigmoid}) {
    AnnTrainOptions o;
    o.layer_sizes = {10, 20, 1};
    o.activation = act;
    o.lambda = 0.1;
    o.epochs = 300;
    std::vector<double> history;
    ann_train(d, o, &history);
    for (std::size_t i = 1; i < history.size(); ++i) CHECK(history[i] <= history[i - 1] + 1e-15);
  }
}

TEST_CASE("an extra hidden unit with zero outgoing weights changes nothing") {
  simd::IsaOverride scalar(simd::Isa::scalar);
  phishdet::Rng rng(9);
  const std::vector<std::size_t> sizes{10, 5, 1};
  const AnnModel m = ann_init(sizes, Activation::relu, 4);
  const std::vector<std::size_t> wider_sizes{10, 6, 1};
  AnnModel wide = ann_init(wider_sizes, Activation::relu, 4);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 5; ++j) wide.layers[0].weights(i, j) = m.layers[0].weights(i, j);
    wide.layers[0].weights(i, 5) = rng.uniform(-1.0, 1.0);
  }
  wide.layers[0].biases = m.layers[0].biases;
  wide.layers[0].biases.push_back(0.7);
  for (std::size_t j = 0; j < 5; ++j) wide.layers[1].weights(j, 0) = m.layers[1].weights(j, 0);
  wide.layers[1].weights(5, 0) = 0.0;
  wide.layers[1].biases = m.layers[1].biases;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(10);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    CHECK(ann_output(wide, x) == ann_output(m, x));
    CHECK(ann_predict(wide, x) == ann_predict(m, x));
  }
}

TEST_CASE("training errors") {
  Dataset one = xor_data();
  one.labels = {1, 1, 1, 1};
  CHECK(code_of([&] { ann_train(one, {}); }) == Errc::SingleClassData);
  AnnTrainOptions o;
  o.layer_sizes = {10, 4, 1};
  o.learning_rate = -1.0;
  CHECK(code_of([&] { ann_train(xor_data(), o); }) == Errc::InvalidHyperparameter);
  o.learning_rate = 0.01;
  o.layer_sizes = {9, 4, 1};
  CHECK(code_of([&] { ann_train(xor_data(), o); }) == Errc::DimensionMismatch);
  o.layer_sizes = {10, 4, 1};
  o.learning_rate = 1e300;
  o.lambda = 0.0;
  phishdet::Rng rng(10);
  CHECK(code_of([&] { ann_train(test::random_dataset(rng, 20, 10), o); }) == Errc::NonFiniteLoss);
}
