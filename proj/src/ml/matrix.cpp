#include "phishdet/ml/matrix.hpp"

#include <string>

#include "phishdet/error.hpp"

namespace phishdet {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(Errc::DimensionMismatch,
                "row of width " + std::to_string(values.size()) + " appended to " + std::to_string(cols_) + " columns");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

}  // namespace phishdet
