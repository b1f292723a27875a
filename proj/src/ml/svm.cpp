#include "phishdet/ml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <string>
#include <unordered_map>

#include "phishdet/error.hpp"
#include "phishdet/simd/kernels.hpp"

namespace phishdet {
namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportThreshold = 1e-8;

// Kernel rows K(x_i, .) with LRU eviction once the byte budget is spent.
class KernelCache {
 public:
  KernelCache(const Matrix& x, const KernelSpec& spec, std::size_t budget_bytes)
      : x_(x), spec_(spec), n_(x.rows()) {
    const std::size_t row_bytes = std::max<std::size_t>(1, n_ * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
    diag_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = kernel_eval(spec_, x_.row(i), x_.row(i));
  }

  double diag(std::size_t i) const { return diag_[i]; }

  const std::vector<double>& row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    std::vector<double> values;
    if (lru_.size() >= capacity_) {
      values = std::move(lru_.back().second);
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    values.assign(n_, 0.0);
    fill(i, values);
    lru_.emplace_front(i, std::move(values));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  void fill(std::size_t i, std::vector<double>& out) const {
    const auto xi = x_.row(i);
    if (spec_.kind == KernelKind::rbf) {
      const auto& k = simd::active();
      for (std::size_t j = 0; j < n_; ++j) {
        out[j] = kernel_from_distance(spec_, k.squared_distance(xi.data(), x_.row(j).data(), xi.size()));
      }
      return;
    }
    simd::active().gemm_nt(xi.data(), x_.data(), out.data(), 1, n_, x_.cols());
    for (double& v : out) v = kernel_from_dot(spec_, v);
  }

  const Matrix& x_;
  KernelSpec spec_;
  std::size_t n_;
  std::size_t capacity_;
  std::vector<double> diag_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, decltype(lru_)::iterator> index_;
};

struct Solver {
  const std::vector<int>& y;
  double c;
  KernelCache& cache;
  std::vector<double> alpha;
  std::vector<double> grad;  // gradient of 1/2 a'Qa - e'a

  bool upper(std::size_t t) const { return alpha[t] >= c; }
  bool lower(std::size_t t) const { return alpha[t] <= 0.0; }

  // Returns false when the maximal violating pair is within tol.
  bool select(double tol, std::size_t& out_i, std::size_t& out_j, double& gap) {
    const std::size_t n = y.size();
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i = t; }
      } else if (!lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best = std::numeric_limits<double>::infinity();
    const std::vector<double>* ki = i < n ? &cache.row(i) : nullptr;
    for (std::size_t t = 0; t < n; ++t) {
      double grad_diff;
      if (y[t] == 1) {
        if (lower(t)) continue;
        grad_diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
      } else {
        if (upper(t)) continue;
        grad_diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
      }
      if (ki == nullptr || grad_diff <= 0.0) continue;
      double quad = cache.diag(i) + cache.diag(t) - 2.0 * (*ki)[t];
      if (quad <= 0.0) quad = kTau;
      const double obj = -(grad_diff * grad_diff) / quad;
      if (obj <= best) { best = obj; j = t; }
    }
    gap = gmax + gmax2;
    if (gap < tol || i == n || j == n) return false;
    out_i = i;
    out_j = j;
    return true;
  }

  void update(std::size_t i, std::size_t j) {
    // The cache holds at least two rows and row(i) was just touched, so
    // fetching row(j) cannot evict it.
    const std::vector<double>& row_i = cache.row(i);
    const std::vector<double>& row_j = cache.row(j);

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    double quad = cache.diag(i) + cache.diag(j) - 2.0 * row_i[j];
    if (quad <= 0.0) quad = kTau;

    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double di = (alpha[i] - old_i) * y[i];
    const double dj = (alpha[j] - old_j) * y[j];
    for (std::size_t t = 0; t < y.size(); ++t) grad[t] += y[t] * (di * row_i[t] + dj * row_j[t]);
  }

  double rho() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < y.size(); ++t) {
      const double yg = y[t] * grad[t];
      if (upper(t)) {
        if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (lower(t)) {
        if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    if (n_free > 0) return sum_free / static_cast<double>(n_free);
    return (ub + lb) / 2.0;
  }
};

void check_dim(const SvmModel& model, std::size_t n) {
  if (n != model.dim() && model.support_vectors.rows() > 0) {
    throw Error(Errc::DimensionMismatch,
                "input has " + std::to_string(n) + " features, model expects " + std::to_string(model.dim()));
  }
}

}  // namespace

SvmModel svm_train(const Dataset& data, const SvmTrainOptions& options, SvmTrainReport* report) {
  options.kernel.validate();
  if (!(options.c_penalty > 0.0) || !std::isfinite(options.c_penalty)) {
    throw Error(Errc::InvalidHyperparameter, "C must be > 0");
  }
  if (!(options.tol > 0.0)) throw Error(Errc::InvalidHyperparameter, "tol must be > 0");
  data.validate();
  require_both_classes(data);

  const std::size_t n = data.size();
  std::vector<int> y(n);
  for (std::size_t t = 0; t < n; ++t) y[t] = data.labels[t] == 1 ? 1 : -1;

  KernelCache cache(data.features, options.kernel, options.cache_bytes);
  Solver solver{y, options.c_penalty, cache, std::vector<double>(n, 0.0), std::vector<double>(n, -1.0)};

  const std::size_t max_iter =
      options.max_iterations > 0 ? options.max_iterations : std::max<std::size_t>(10'000'000, 100 * n);
  std::size_t iter = 0;
  double gap = 0.0;
  bool converged = false;
  while (true) {
    std::size_t i = 0, j = 0;
    if (!solver.select(options.tol, i, j, gap)) {
      converged = true;
      break;
    }
    if (iter >= max_iter) break;
    solver.update(i, j);
    ++iter;
  }

  SvmModel model;
  model.kernel = options.kernel;
  model.c_penalty = options.c_penalty;
  model.tol = options.tol;
  model.bias = -solver.rho();
  model.converged = converged;
  model.iterations = iter;
  model.support_vectors = Matrix(0, data.dim());
  for (std::size_t t = 0; t < n; ++t) {
    if (solver.alpha[t] > kSupportThreshold) {
      model.support_vectors.append_row(data.features.row(t));
      model.support_labels.push_back(y[t]);
      model.alphas.push_back(solver.alpha[t]);
    }
  }
  if (report) {
    report->alphas = solver.alpha;
    report->kkt_gap = gap;
    report->iterations = iter;
    report->converged = converged;
  }
  return model;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
  check_dim(model, x.size());
  double sum = 0.0;
  for (std::size_t s = 0; s < model.alphas.size(); ++s) {
    sum += model.alphas[s] * model.support_labels[s] * kernel_eval(model.kernel, model.support_vectors.row(s), x);
  }
  return sum + model.bias;
}

int svm_predict(const SvmModel& model, std::span<const double> x) { return svm_decision(model, x) >= 0.0 ? 1 : 0; }

}  // namespace phishdet
