#include "phishdet/ml/kernel.hpp"

#include <cmath>
#include <string>

#include "phishdet/error.hpp"
#include "phishdet/simd/kernels.hpp"

namespace phishdet {

std::string_view to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "poly";
    case KernelKind::rbf: return "rbf";
    case KernelKind::sigmoid: return "sigmoid";
  }
  return "unknown";
}

std::optional<KernelKind> parse_kernel_kind(std::string_view name) noexcept {
  if (name == "linear") return KernelKind::linear;
  if (name == "poly" || name == "polynomial") return KernelKind::polynomial;
  if (name == "rbf") return KernelKind::rbf;
  if (name == "sigmoid") return KernelKind::sigmoid;
  return std::nullopt;
}

KernelSpec KernelSpec::linear() { return KernelSpec{KernelKind::linear, 3, 0.1, 0.0}; }

KernelSpec KernelSpec::polynomial(int degree, double gamma, double coef0) {
  return KernelSpec{KernelKind::polynomial, degree, gamma, coef0};
}

KernelSpec KernelSpec::rbf(double gamma) { return KernelSpec{KernelKind::rbf, 3, gamma, 0.0}; }

KernelSpec KernelSpec::sigmoid(double gamma, double coef0) { return KernelSpec{KernelKind::sigmoid, 3, gamma, coef0}; }

KernelSpec KernelSpec::defaults(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return linear();
    case KernelKind::polynomial: return polynomial();
    case KernelKind::rbf: return rbf();
    case KernelKind::sigmoid: return sigmoid();
  }
  return linear();
}

void KernelSpec::validate() const {
  if (degree < 1) throw Error(Errc::InvalidHyperparameter, "kernel degree must be >= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(Errc::InvalidHyperparameter, "kernel gamma must be > 0");
  if (!std::isfinite(coef0)) throw Error(Errc::InvalidHyperparameter, "kernel coef0 must be finite");
}

double kernel_from_dot(const KernelSpec& spec, double dot) noexcept {
  switch (spec.kind) {
    case KernelKind::linear: return dot;
    case KernelKind::polynomial: {
      const double base = spec.gamma * dot + spec.coef0;
      double r = 1.0;
      for (int d = 0; d < spec.degree; ++d) r *= base;
      return r;
    }
    case KernelKind::sigmoid: return std::tanh(spec.gamma * dot + spec.coef0);
    case KernelKind::rbf: break;
  }
  return dot;
}

double kernel_from_distance(const KernelSpec& spec, double squared_distance) noexcept {
  return std::exp(-spec.gamma * squared_distance);
}

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::DimensionMismatch,
                "kernel arguments have " + std::to_string(a.size()) + " and " + std::to_string(b.size()) + " entries");
  }
  if (spec.kind == KernelKind::rbf) return kernel_from_distance(spec, simd::squared_distance(a, b));
  return kernel_from_dot(spec, simd::dot(a, b));
}

}  // namespace phishdet
