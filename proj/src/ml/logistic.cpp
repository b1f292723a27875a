#include "phishdet/ml/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phishdet/error.hpp"
#include "phishdet/simd/kernels.hpp"

namespace phishdet {
namespace {

void check_dim(const LogisticModel& model, std::size_t n) {
  if (model.weights.empty() || n != model.dim()) {
    throw Error(Errc::DimensionMismatch,
                "input has " + std::to_string(n) + " features, model expects " + std::to_string(model.dim()));
  }
}

double linear_term(const LogisticModel& model, std::span<const double> x) {
  return model.weights[0] + simd::dot(std::span(model.weights).subspan(1), x);
}

void validate_options(const LogisticTrainOptions& o) {
  if (!(o.lambda >= 0.0) || !std::isfinite(o.lambda)) throw Error(Errc::InvalidHyperparameter, "lambda must be >= 0");
  if (!(o.learning_rate > 0.0) || !std::isfinite(o.learning_rate)) {
    throw Error(Errc::InvalidHyperparameter, "learning rate must be > 0");
  }
  if (o.epochs <= 0) throw Error(Errc::InvalidHyperparameter, "epochs must be > 0");
}

// Data part of the gradient (no regularization), bias first.
void data_gradient(const LogisticModel& model, const Dataset& data, std::vector<double>& grad) {
  const std::size_t m = data.size();
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::span<double> feature_grad = std::span(grad).subspan(1);
  for (std::size_t i = 0; i < m; ++i) {
    const auto x = data.features.row(i);
    const double err = sigmoid(linear_term(model, x)) - data.labels[i];
    grad[0] += err;
    simd::axpy(err, x, feature_grad);
  }
  for (double& g : grad) g /= static_cast<double>(m);
}

}  // namespace

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double cross_entropy(double h, int y) noexcept {
  h = std::clamp(h, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return y == 1 ? -std::log(h) : -std::log1p(-h);
}

double lr_hypothesis(const LogisticModel& model, std::span<const double> x) {
  check_dim(model, x.size());
  return sigmoid(linear_term(model, x));
}

int lr_predict(const LogisticModel& model, std::span<const double> x) { return lr_hypothesis(model, x) > 0.5 ? 1 : 0; }

double lr_cost(const LogisticModel& model, const Dataset& data) {
  check_dim(model, data.dim());
  const std::size_t m = data.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) loss += cross_entropy(sigmoid(linear_term(model, data.features.row(i))), data.labels[i]);
  double penalty = 0.0;
  for (std::size_t j = 1; j < model.weights.size(); ++j) penalty += model.weights[j] * model.weights[j];
  const auto md = static_cast<double>(m);
  return loss / md + model.lambda / (2.0 * md) * penalty;
}

std::vector<double> lr_gradient(const LogisticModel& model, const Dataset& data) {
  check_dim(model, data.dim());
  std::vector<double> grad(model.weights.size());
  data_gradient(model, data, grad);
  const auto md = static_cast<double>(data.size());
  for (std::size_t j = 1; j < grad.size(); ++j) grad[j] += model.lambda / md * model.weights[j];
  return grad;
}

LogisticModel lr_train(const Dataset& data, const LogisticTrainOptions& options, std::vector<double>* cost_history) {
  validate_options(options);
  data.validate();
  if (data.size() < 2) throw Error(Errc::InsufficientData, "logistic regression needs at least two rows");
  require_both_classes(data);

  LogisticModel model;
  model.weights.assign(data.dim() + 1, 0.0);
  model.lambda = options.lambda;
  model.learning_rate = options.learning_rate;
  model.epochs = options.epochs;

  const double eta = options.learning_rate;
  const double shrink = 1.0 / (1.0 + eta * options.lambda / static_cast<double>(data.size()));
  std::vector<double> grad(model.weights.size());
  if (cost_history) cost_history->clear();

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    data_gradient(model, data, grad);
    model.weights[0] -= eta * grad[0];
    for (std::size_t j = 1; j < model.weights.size(); ++j) {
      model.weights[j] = (model.weights[j] - eta * grad[j]) * shrink;
    }
    const bool finite = std::all_of(model.weights.begin(), model.weights.end(), [](double w) { return std::isfinite(w); });
    const double cost = finite ? lr_cost(model, data) : NAN;
    if (!std::isfinite(cost)) {
      throw Error(Errc::NonFiniteLoss, "cost diverged at epoch " + std::to_string(epoch + 1) +
                                           "; lower the learning rate");
    }
    if (cost_history) cost_history->push_back(cost);
  }
  return model;
}

}  // namespace phishdet
