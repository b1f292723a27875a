#pragma once

#include <span>
#include <vector>

#include "phishdet/ml/dataset.hpp"

namespace phishdet {

// Clamp applied to hypothesis values inside the cross-entropy only.
inline constexpr double kProbabilityClamp = 1e-12;

// 1 / (1 + e^-z), evaluated without overflow for any finite z.
double sigmoid(double z) noexcept;

// Binary cross-entropy of one prediction, with h clamped to
// [kProbabilityClamp, 1 - kProbabilityClamp].
double cross_entropy(double h, int y) noexcept;

struct LogisticModel {
  // weights[0] is the bias, weights[j] multiplies feature j-1.
  std::vector<double> weights;
  double lambda = 0.0;
  double learning_rate = 0.1;
  int epochs = 2000;

  std::size_t dim() const noexcept { return weights.empty() ? 0 : weights.size() - 1; }
  bool operator==(const LogisticModel&) const = default;
};

struct LogisticTrainOptions {
  double lambda = 0.0;
  double learning_rate = 0.1;
  int epochs = 2000;
};

double lr_hypothesis(const LogisticModel& model, std::span<const double> x);

// 1 iff the hypothesis is strictly above 0.5.
int lr_predict(const LogisticModel& model, std::span<const double> x);

// -(1/m) sum [y log h + (1-y) log(1-h)] + (lambda/2m) sum_{j>=1} w_j^2
double lr_cost(const LogisticModel& model, const Dataset& data);

// Gradient of lr_cost with respect to weights (bias first).
std::vector<double> lr_gradient(const LogisticModel& model, const Dataset& data);

// Full-batch gradient descent from zero weights. The L2 term is applied as a
// proximal (multiplicative shrink) step so that very large lambda stays
// stable; the bias is never penalized. cost_history, when given, receives
// lr_cost after every epoch.
LogisticModel lr_train(const Dataset& data, const LogisticTrainOptions& options,
                       std::vector<double>* cost_history = nullptr);

}  // namespace phishdet
