#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phishdet/ml/matrix.hpp"

namespace phishdet {

// Feature rows with 0/1 labels (1 = phishing). The SVM reads labels as
// -1/+1 with +1 = phishing.
struct Dataset {
  Matrix features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return features.cols(); }

  // Row/label counts agree, labels are 0/1, values are finite.
  void validate() const;
  std::size_t count(int label) const;
  bool has_both_classes() const { return count(0) > 0 && count(1) > 0; }

  Dataset subset(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;
};

// Throws Error{SingleClassData} unless both labels occur.
void require_both_classes(const Dataset& data);

}  // namespace phishdet
