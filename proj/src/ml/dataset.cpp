#include "phishdet/ml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phishdet/error.hpp"

namespace phishdet {

void Dataset::validate() const {
  if (features.rows() != labels.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(features.rows()) + " rows but " + std::to_string(labels.size()) +
                                          " labels");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(Errc::SchemaMismatch, "label " + std::to_string(y) + " is not 0 or 1");
  }
  const auto values = features.values();
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(Errc::SchemaMismatch, "non-finite feature value");
  }
}

std::size_t Dataset::count(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.features = Matrix(indices.size(), dim());
  out.labels.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto src = features.row(indices[k]);
    std::copy(src.begin(), src.end(), out.features.row(k).begin());
    out.labels.push_back(labels[indices[k]]);
  }
  return out;
}

void require_both_classes(const Dataset& data) {
  if (!data.has_both_classes()) {
    throw Error(Errc::SingleClassData, "training data needs both classes (got " + std::to_string(data.count(0)) +
                                           " legitimate, " + std::to_string(data.count(1)) + " phishing)");
  }
}

}  // namespace phishdet
