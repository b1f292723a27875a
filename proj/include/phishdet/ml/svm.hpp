#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phishdet/ml/dataset.hpp"
#include "phishdet/ml/kernel.hpp"

namespace phishdet {

struct SvmModel {
  KernelSpec kernel;
  double c_penalty = 1.0;
  double tol = 1e-3;
  Matrix support_vectors;
  std::vector<int> support_labels;  // -1 / +1
  std::vector<double> alphas;       // one per support vector
  double bias = 0.0;
  bool converged = true;
  std::size_t iterations = 0;

  std::size_t dim() const noexcept { return support_vectors.cols(); }
  bool operator==(const SvmModel&) const = default;
};

struct SvmTrainOptions {
  KernelSpec kernel;
  double c_penalty = 1.0;
  double tol = 1e-3;
  // 0 picks max(10'000'000, 100 n).
  std::size_t max_iterations = 0;
  std::size_t cache_bytes = std::size_t{256} << 20;
};

struct SvmTrainReport {
  // Full dual solution, one entry per training row.
  std::vector<double> alphas;
  // Maximal violating pair gap at exit; below tol on convergence.
  double kkt_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

// Soft-margin dual solved by SMO with second-order working-set selection.
// When the iteration cap is hit the best-so-far model is returned with
// converged = false.
SvmModel svm_train(const Dataset& data, const SvmTrainOptions& options, SvmTrainReport* report = nullptr);

// sum_i alpha_i y_i K(sv_i, x) + bias
double svm_decision(const SvmModel& model, std::span<const double> x);

// 1 iff the decision value is >= 0.
int svm_predict(const SvmModel& model, std::span<const double> x);

}  // namespace phishdet
