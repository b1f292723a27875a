#include "phishdet/eval/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "phishdet/error.hpp"
#include "phishdet/ml/rng.hpp"

namespace phishdet {
namespace {

constexpr double kMinStd = 1e-12;

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (row.size() != dim()) {
    throw Error(Errc::DimensionMismatch,
                "row has " + std::to_string(row.size()) + " features, standardizer expects " + std::to_string(dim()));
  }
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - means[j]) / stds[j];
  return out;
}

Standardizer fit_standardizer(const Dataset& train) {
  const std::size_t m = train.features.rows();
  if (m == 0) throw Error(Errc::EmptyDataset, "cannot fit a standardizer on zero rows");
  const std::size_t d = train.dim();
  Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.means[j] += train.features(i, j);
  }
  for (double& v : s.means) v /= static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = train.features(i, j) - s.means[j];
      s.stds[j] += c * c;
    }
  }
  for (double& v : s.stds) {
    v = std::sqrt(v / static_cast<double>(m));
    if (v < kMinStd) v = 1.0;
  }
  return s;
}

Dataset apply_standardizer(const Standardizer& s, const Dataset& data) {
  if (data.dim() != s.dim()) {
    throw Error(Errc::DimensionMismatch,
                "dataset has " + std::to_string(data.dim()) + " columns, standardizer expects " + std::to_string(s.dim()));
  }
  Dataset out = data;
  for (std::size_t i = 0; i < out.features.rows(); ++i) {
    auto row = out.features.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - s.means[j]) / s.stds[j];
  }
  return out;
}

NominalEncoder fit_nominal_encoder(const RawTable& train) {
  const std::size_t d = train.columns.size();
  NominalEncoder enc;
  enc.categories.resize(d);
  enc.numeric.assign(d, true);
  for (std::size_t j = 0; j < d; ++j) {
    std::set<std::string> seen;
    for (const auto& row : train.rows) {
      if (row.size() != d) throw Error(Errc::SchemaMismatch, "row width differs from header");
      seen.insert(row[j]);
      if (!parse_number(row[j])) enc.numeric[j] = false;
    }
    if (!enc.numeric[j]) enc.categories[j].assign(seen.begin(), seen.end());
  }
  return enc;
}

Dataset encode_nominal(const NominalEncoder& encoder, const RawTable& table) {
  const std::size_t d = encoder.numeric.size();
  if (table.columns.size() != d) throw Error(Errc::SchemaMismatch, "table width differs from the fitted encoder");
  if (table.labels.size() != table.rows.size()) throw Error(Errc::LengthMismatch, "row and label counts differ");
  Dataset out;
  out.features = Matrix(table.rows.size(), d);
  out.labels = table.labels;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.size() != d) throw Error(Errc::SchemaMismatch, "row " + std::to_string(i) + " width differs from header");
    for (std::size_t j = 0; j < d; ++j) {
      if (encoder.numeric[j]) {
        const auto v = parse_number(row[j]);
        if (!v) throw Error(Errc::SchemaMismatch, "column " + table.columns[j] + ": '" + row[j] + "' is not a number");
        out.features(i, j) = *v;
        continue;
      }
      const auto& cats = encoder.categories[j];
      const auto it = std::lower_bound(cats.begin(), cats.end(), row[j]);
      if (it == cats.end() || *it != row[j]) {
        throw Error(Errc::UnknownCategory, "column " + table.columns[j] + ": unseen category '" + row[j] + "'");
      }
      out.features(i, j) = static_cast<double>(it - cats.begin());
    }
  }
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(Errc::InvalidHyperparameter, "train fraction must lie in (0, 1)");
  }
  data.validate();
  Rng rng(spec.rng_seed);
  std::vector<bool> in_train(data.size(), false);

  auto take = [&](std::vector<std::size_t> members, const char* what) {
    if (members.size() < 2) {
      throw Error(Errc::InsufficientData, std::string(what) + " has " + std::to_string(members.size()) +
                                              " rows; at least 2 are needed to split");
    }
    const auto n = static_cast<double>(members.size());
    auto k = static_cast<std::size_t>(std::llround(spec.train_fraction * n));
    k = std::clamp<std::size_t>(k, 1, members.size() - 1);
    rng.shuffle(members.begin(), members.end());
    for (std::size_t t = 0; t < k; ++t) in_train[members[t]] = true;
  };

  if (spec.stratified) {
    for (int label : {0, 1}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] == label) members.push_back(i);
      }
      take(std::move(members), label == 1 ? "phishing class" : "legitimate class");
    }
  } else {
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    take(std::move(all), "dataset");
  }

  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < data.size(); ++i) (in_train[i] ? train_idx : test_idx).push_back(i);
  return {data.subset(train_idx), data.subset(test_idx)};
}

}  // namespace phishdet
