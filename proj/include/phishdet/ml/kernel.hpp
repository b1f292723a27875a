#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace phishdet {

enum class KernelKind { linear, polynomial, rbf, sigmoid };

std::string_view to_string(KernelKind kind) noexcept;
// Accepts "linear", "poly"/"polynomial", "rbf", "sigmoid".
std::optional<KernelKind> parse_kernel_kind(std::string_view name) noexcept;

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  int degree = 3;
  double gamma = 0.1;
  double coef0 = 0.0;

  static KernelSpec linear();
  static KernelSpec polynomial(int degree = 3, double gamma = 0.1, double coef0 = 1.0);
  static KernelSpec rbf(double gamma = 0.1);
  static KernelSpec sigmoid(double gamma = 0.1, double coef0 = 0.0);

  // Defaults for `kind` as listed above.
  static KernelSpec defaults(KernelKind kind);

  // Throws InvalidHyperparameter on degree < 1 or non-positive/non-finite gamma.
  void validate() const;

  bool operator==(const KernelSpec&) const = default;
};

// linear: a.b
// polynomial: (gamma a.b + coef0)^degree
// rbf: exp(-gamma |a-b|^2)
// sigmoid: tanh(gamma a.b + coef0)
double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

// Same as kernel_eval given a precomputed a.b or |a-b|^2 (whichever the kind
// needs); used by the SMO row cache.
double kernel_from_dot(const KernelSpec& spec, double dot) noexcept;
double kernel_from_distance(const KernelSpec& spec, double squared_distance) noexcept;

}  // namespace phishdet
