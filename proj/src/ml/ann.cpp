#include "phishdet/ml/ann.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "phishdet/error.hpp"
#include "phishdet/ml/logistic.hpp"
#include "phishdet/ml/rng.hpp"
#include "phishdet/simd/kernels.hpp"

namespace phishdet {
namespace {

double activate(Activation a, double z) noexcept {
  switch (a) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
    case Activation::sigmoid: return sigmoid(z);
  }
  return z;
}

// Derivative expressed through the activation value.
double activation_slope(Activation a, double value) noexcept {
  switch (a) {
    case Activation::relu: return value > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: return 1.0 - value * value;
    case Activation::sigmoid: return value * (1.0 - value);
  }
  return 1.0;
}

void check_shape(const AnnModel& model) {
  const auto& sizes = model.layer_sizes;
  if (sizes.size() < 2 || sizes.back() != 1 || model.layers.size() + 1 != sizes.size()) {
    throw Error(Errc::DimensionMismatch, "network must map its input to a single output unit");
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const AnnLayer& layer = model.layers[l];
    if (layer.weights.rows() != sizes[l] || layer.weights.cols() != sizes[l + 1] || layer.biases.size() != sizes[l + 1]) {
      throw Error(Errc::DimensionMismatch, "layer " + std::to_string(l) + " does not match layer_sizes");
    }
  }
}

void check_input(const AnnModel& model, std::size_t n) {
  if (n != model.input_dim()) {
    throw Error(Errc::DimensionMismatch,
                "input has " + std::to_string(n) + " features, network expects " + std::to_string(model.input_dim()));
  }
}

// Activations of every layer for all rows at once; outputs[0] aliases the
// input matrix by copy.
std::vector<Matrix> forward_batch(const AnnModel& model, const Matrix& inputs) {
  const simd::KernelTable& k = simd::active();
  std::vector<Matrix> acts;
  acts.reserve(model.layers.size() + 1);
  acts.push_back(inputs);
  const std::size_t m = inputs.rows();
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const AnnLayer& layer = model.layers[l];
    const std::size_t in = layer.weights.rows();
    const std::size_t out = layer.weights.cols();
    Matrix z(m, out);
    for (std::size_t i = 0; i < m; ++i) std::copy(layer.biases.begin(), layer.biases.end(), z.row(i).begin());
    k.gemm_nn(acts.back().data(), layer.weights.data(), z.data(), m, in, out);
    const bool output_layer = l + 1 == model.layers.size();
    for (double& v : z.values()) v = output_layer ? sigmoid(v) : activate(model.activation, v);
    acts.push_back(std::move(z));
  }
  return acts;
}

double penalty(const AnnModel& model) {
  double sum = 0.0;
  for (const AnnLayer& layer : model.layers) {
    const auto w = layer.weights.values();
    sum += simd::dot(w, w);
  }
  return sum;
}

// Distinct (row, label) pairs with their multiplicities. Feature rows are
// 0/1 indicators (or a scaling of them), so a few thousand training rows
// collapse to at most 2^10 patterns per class and the full-batch pass can
// run on the patterns instead.
struct WeightedData {
  Dataset data;
  std::vector<double> weights;
  double total = 0.0;
};

WeightedData compress(const Dataset& data) {
  WeightedData out;
  out.data.features = Matrix(0, data.dim());
  std::map<std::pair<std::vector<double>, int>, std::size_t> index;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.features.row(i);
    auto key = std::make_pair(std::vector<double>(row.begin(), row.end()), data.labels[i]);
    auto [it, inserted] = index.emplace(std::move(key), out.weights.size());
    if (inserted) {
      out.data.features.append_row(row);
      out.data.labels.push_back(data.labels[i]);
      out.weights.push_back(0.0);
    }
    out.weights[it->second] += 1.0;
  }
  out.total = static_cast<double>(data.size());
  return out;
}

WeightedData uniform(const Dataset& data) {
  return WeightedData{data, std::vector<double>(data.size(), 1.0), static_cast<double>(data.size())};
}

double cost_from_outputs(const AnnModel& model, const Matrix& outputs, const WeightedData& wd) {
  double loss = 0.0;
  for (std::size_t i = 0; i < wd.data.size(); ++i) loss += wd.weights[i] * cross_entropy(outputs(i, 0), wd.data.labels[i]);
  const double m = wd.total;
  return loss / m + model.lambda / (2.0 * m) * penalty(model);
}

// Gradient of the unregularized cross-entropy, given a forward pass.
std::vector<AnnLayer> backprop(const AnnModel& model, const std::vector<Matrix>& acts, const WeightedData& wd) {
  const simd::KernelTable& k = simd::active();
  const Dataset& data = wd.data;
  const std::size_t m = data.size();
  std::vector<AnnLayer> grads(model.layers.size());

  // sigmoid output + cross-entropy: dJ/dz = (h - y) / m
  Matrix delta(m, 1);
  for (std::size_t i = 0; i < m; ++i) delta(i, 0) = wd.weights[i] * (acts.back()(i, 0) - data.labels[i]) / wd.total;

  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const AnnLayer& layer = model.layers[l];
    const std::size_t in = layer.weights.rows();
    const std::size_t out = layer.weights.cols();
    AnnLayer& g = grads[l];
    g.weights = Matrix(in, out);
    g.biases.assign(out, 0.0);
    k.gemm_tn(acts[l].data(), delta.data(), g.weights.data(), m, in, out);
    for (std::size_t i = 0; i < m; ++i) k.axpy(1.0, delta.row(i).data(), g.biases.data(), out);
    if (l == 0) break;

    Matrix upstream(m, in);
    k.gemm_nt(delta.data(), layer.weights.data(), upstream.data(), m, in, out);
    const Matrix& a = acts[l];
    auto up = upstream.values();
    const auto av = a.values();
    for (std::size_t t = 0; t < up.size(); ++t) up[t] *= activation_slope(model.activation, av[t]);
    delta = std::move(upstream);
  }
  return grads;
}

}  // namespace

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "unknown";
}

std::optional<Activation> parse_activation(std::string_view name) noexcept {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  return std::nullopt;
}

AnnModel ann_init(std::span<const std::size_t> layer_sizes, Activation activation, std::uint64_t seed) {
  if (layer_sizes.size() < 2 || layer_sizes.back() != 1 ||
      std::any_of(layer_sizes.begin(), layer_sizes.end(), [](std::size_t s) { return s == 0; })) {
    throw Error(Errc::InvalidHyperparameter, "layer sizes must be positive and end with a single output unit");
  }
  AnnModel model;
  model.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  model.activation = activation;
  model.rng_seed = seed;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    AnnLayer layer{Matrix(layer_sizes[l], layer_sizes[l + 1]), std::vector<double>(layer_sizes[l + 1], 0.0)};
    for (double& w : layer.weights.values()) w = rng.uniform(-0.5, 0.5);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

AnnForward ann_forward(const AnnModel& model, std::span<const double> x) {
  check_shape(model);
  check_input(model, x.size());
  AnnForward result;
  result.activations.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const AnnLayer& layer = model.layers[l];
    std::vector<double> z = layer.biases;
    simd::active().gemm_nn(result.activations.back().data(), layer.weights.data(), z.data(), 1, layer.weights.rows(),
                           layer.weights.cols());
    const bool output_layer = l + 1 == model.layers.size();
    for (double& v : z) v = output_layer ? sigmoid(v) : activate(model.activation, v);
    result.activations.push_back(std::move(z));
  }
  result.output = result.activations.back().front();
  return result;
}

double ann_output(const AnnModel& model, std::span<const double> x) { return ann_forward(model, x).output; }

int ann_predict(const AnnModel& model, std::span<const double> x) { return ann_output(model, x) > 0.5 ? 1 : 0; }

double ann_cost(const AnnModel& model, const Dataset& data) {
  check_shape(model);
  check_input(model, data.dim());
  if (data.size() == 0) throw Error(Errc::EmptyDataset, "cost of an empty dataset");
  const auto acts = forward_batch(model, data.features);
  return cost_from_outputs(model, acts.back(), uniform(data));
}

std::vector<AnnLayer> ann_gradient(const AnnModel& model, const Dataset& data) {
  check_shape(model);
  check_input(model, data.dim());
  if (data.size() == 0) throw Error(Errc::EmptyDataset, "gradient of an empty dataset");
  auto grads = backprop(model, forward_batch(model, data.features), uniform(data));
  const double scale = model.lambda / static_cast<double>(data.size());
  for (std::size_t l = 0; l < grads.size(); ++l) {
    simd::axpy(scale, model.layers[l].weights.values(), grads[l].weights.values());
  }
  return grads;
}

AnnModel ann_train(const Dataset& data, const AnnTrainOptions& options, std::vector<double>* cost_history) {
  if (!(options.lambda >= 0.0) || !std::isfinite(options.lambda)) {
    throw Error(Errc::InvalidHyperparameter, "lambda must be >= 0");
  }
  if (!(options.learning_rate > 0.0) || !std::isfinite(options.learning_rate)) {
    throw Error(Errc::InvalidHyperparameter, "learning rate must be > 0");
  }
  if (options.epochs <= 0) throw Error(Errc::InvalidHyperparameter, "epochs must be > 0");
  data.validate();
  require_both_classes(data);

  AnnModel model = ann_init(options.layer_sizes, options.activation, options.rng_seed);
  check_input(model, data.dim());
  model.lambda = options.lambda;
  model.learning_rate = options.learning_rate;
  model.epochs = options.epochs;

  const double eta = options.learning_rate;
  const double shrink = 1.0 / (1.0 + eta * options.lambda / static_cast<double>(data.size()));
  if (cost_history) cost_history->clear();

  const WeightedData wd = compress(data);
  auto acts = forward_batch(model, wd.data.features);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const auto grads = backprop(model, acts, wd);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      AnnLayer& layer = model.layers[l];
      auto w = layer.weights.values();
      const auto gw = grads[l].weights.values();
      for (std::size_t t = 0; t < w.size(); ++t) w[t] = (w[t] - eta * gw[t]) * shrink;
      simd::axpy(-eta, grads[l].biases, layer.biases);
    }
    acts = forward_batch(model, wd.data.features);
    const double cost = cost_from_outputs(model, acts.back(), wd);
    if (!std::isfinite(cost)) {
      throw Error(Errc::NonFiniteLoss, "cost diverged at epoch " + std::to_string(epoch + 1) +
                                           "; lower the learning rate");
    }
    if (cost_history) cost_history->push_back(cost);
  }
  return model;
}

}  // namespace phishdet
