#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phishdet/ml/dataset.hpp"

namespace phishdet {

// Per-column z-scoring with statistics taken from the rows it was fitted on.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> stds;  // population std; 1 for constant columns

  std::size_t dim() const noexcept { return means.size(); }
  std::vector<double> apply(std::span<const double> row) const;
  bool operator==(const Standardizer&) const = default;
};

// Throws EmptyDataset on zero rows.
Standardizer fit_standardizer(const Dataset& train);
// Throws DimensionMismatch when widths differ.
Dataset apply_standardizer(const Standardizer& s, const Dataset& data);

// String table as read from a file, before numeric encoding.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> labels;
};

// Column-wise mapping. A column whose training values all parse as numbers
// is kept numeric (categories empty); otherwise its sorted distinct values
// map to 0, 1, 2, ...
struct NominalEncoder {
  std::vector<std::vector<std::string>> categories;
  std::vector<bool> numeric;

  bool operator==(const NominalEncoder&) const = default;
};

NominalEncoder fit_nominal_encoder(const RawTable& train);
// Throws UnknownCategory for values outside the fitted categories and
// SchemaMismatch for ragged rows or unparsable numeric cells.
Dataset encode_nominal(const NominalEncoder& encoder, const RawTable& table);

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t rng_seed = 0;
  bool stratified = true;
};

// Seeded partition into (train, test). Rows keep their original relative
// order inside each part. Stratified splits take round(fraction * n_c) rows
// of each class, clamped so both parts see every class. Throws
// InsufficientData when a class (or, unstratified, the whole set) has
// fewer than two rows.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, const SplitSpec& spec);

}  // namespace phishdet
