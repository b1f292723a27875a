#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "phishdet/ml/dataset.hpp"

namespace phishdet {

enum class Activation { relu, tanh, sigmoid };

std::string_view to_string(Activation a) noexcept;
std::optional<Activation> parse_activation(std::string_view name) noexcept;

// One affine layer: weights is (inputs x outputs), so weights(i, j) connects
// input unit i to output unit j.
struct AnnLayer {
  Matrix weights;
  std::vector<double> biases;

  bool operator==(const AnnLayer&) const = default;
};

// Feed-forward network: `activation` on every hidden layer, a single sigmoid
// unit on the output.
struct AnnModel {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., 1
  Activation activation = Activation::relu;
  std::vector<AnnLayer> layers;          // layer_sizes.size() - 1 entries
  double lambda = 0.0;
  double learning_rate = 0.01;
  int epochs = 2000;
  std::uint64_t rng_seed = 0;

  std::size_t input_dim() const noexcept { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  bool operator==(const AnnModel&) const = default;
};

struct AnnTrainOptions {
  std::vector<std::size_t> layer_sizes{10, 100, 100, 1};
  Activation activation = Activation::relu;
  double lambda = 0.0;
  double learning_rate = 0.01;
  int epochs = 2000;
  std::uint64_t rng_seed = 0;
};

struct AnnForward {
  // activations[0] is the input, activations.back() holds the output unit.
  std::vector<std::vector<double>> activations;
  double output = 0.5;
};

// Weights uniform in [-0.5, 0.5] from `seed`, biases zero.
AnnModel ann_init(std::span<const std::size_t> layer_sizes, Activation activation, std::uint64_t seed);

AnnForward ann_forward(const AnnModel& model, std::span<const double> x);
double ann_output(const AnnModel& model, std::span<const double> x);
// 1 iff the output is strictly above 0.5.
int ann_predict(const AnnModel& model, std::span<const double> x);

// Cross-entropy over `data` plus (lambda/2m) times the sum of squared
// connection weights (biases excluded).
double ann_cost(const AnnModel& model, const Dataset& data);

// Backpropagated gradient of ann_cost, shaped like model.layers.
std::vector<AnnLayer> ann_gradient(const AnnModel& model, const Dataset& data);

// Full-batch gradient descent (proximal L2 step, biases unpenalized).
// Deterministic for a given seed.
AnnModel ann_train(const Dataset& data, const AnnTrainOptions& options, std::vector<double>* cost_history = nullptr);

}  // namespace phishdet
