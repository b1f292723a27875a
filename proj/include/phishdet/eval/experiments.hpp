#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phishdet/eval/metrics.hpp"
#include "phishdet/eval/preprocess.hpp"
#include "phishdet/ml/model_io.hpp"

namespace phishdet {

enum class ModelFamily { lr, ann, svm };

std::string_view to_string(ModelFamily family) noexcept;
std::optional<ModelFamily> parse_model_family(std::string_view name) noexcept;

struct TrainSpec {
  ModelFamily family = ModelFamily::lr;
  LogisticTrainOptions lr;
  AnnTrainOptions ann;
  SvmTrainOptions svm;
};

// Trains on rows that are already scaled; the returned bundle carries no
// standardizer.
Model train_model(const Dataset& train, const TrainSpec& spec);

// Fits a standardizer on `raw_train`, trains on the scaled rows, and returns
// both together.
ModelBundle train_bundle(const Dataset& raw_train, const TrainSpec& spec);

Metrics evaluate_bundle(const ModelBundle& bundle, const Dataset& raw_test,
                        PfaDenominator pfa = PfaDenominator::standard);

// A split whose parts are already standardized with training statistics.
struct PreparedSplit {
  Dataset train;
  Dataset test;
  Standardizer standardizer;
};

PreparedSplit prepare_split(const Dataset& data, const SplitSpec& spec);

// Trains on split.train, scores split.test.
Metrics evaluate_on_split(const PreparedSplit& split, const TrainSpec& spec,
                          PfaDenominator pfa = PfaDenominator::standard);

struct SweepResult {
  std::vector<double> parameter_values;
  std::vector<Metrics> metrics_per_value;
};

// Sweeps lambda for lr/ann and C for svm. The grid must be non-empty and
// strictly increasing. Training errors are rethrown with the offending value
// in the message.
SweepResult regularization_sweep(const PreparedSplit& split, const TrainSpec& base, std::span<const double> grid,
                                 PfaDenominator pfa = PfaDenominator::standard);

struct TableRow {
  std::string config;
  Metrics metrics;
};

struct ComparisonTable {
  std::vector<TableRow> rows;
  std::size_t best = 0;  // first row with the highest accuracy
};

// {(100), (100,100)} x {relu, tanh, sigmoid}; other options come from `base`.
ComparisonTable ann_grid(const PreparedSplit& split, const AnnTrainOptions& base,
                         PfaDenominator pfa = PfaDenominator::standard);

// Linear, cubic polynomial, rbf and sigmoid kernels with their defaults.
ComparisonTable kernel_comparison(const PreparedSplit& split, const SvmTrainOptions& base,
                                  PfaDenominator pfa = PfaDenominator::standard);

struct ComparisonOptions {
  AnnTrainOptions ann;
  SvmTrainOptions svm;
  LogisticTrainOptions lr;
  std::vector<double> lr_lambdas{0.0, 0.001, 0.01, 0.1, 0.4, 0.7, 1.0};
};

// One row per family (ANN, SVM, LR), each the best of its own grid; the
// config column names the winning setting.
ComparisonTable model_comparison(const PreparedSplit& split, const ComparisonOptions& options,
                                 PfaDenominator pfa = PfaDenominator::standard);
// Same, reusing grids that were already evaluated.
ComparisonTable model_comparison(const PreparedSplit& split, const ComparisonOptions& options,
                                 const ComparisonTable& ann, const ComparisonTable& svm,
                                 PfaDenominator pfa = PfaDenominator::standard);

// "a:b:step" (inclusive) or a comma-separated list. Throws InvalidConfig.
std::vector<double> parse_grid(std::string_view spec);

// param,p_d,p_fa,p_md,accuracy with four fractional digits.
std::string sweep_csv(const SweepResult& sweep);
std::string table_csv(const ComparisonTable& table);
// Fixed-width text table with percentages.
std::string table_report(const std::string& title, const ComparisonTable& table);
std::string metrics_report(const Metrics& m);

}  // namespace phishdet
