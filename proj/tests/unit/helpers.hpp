#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "phishdet/ml/dataset.hpp"
#include "phishdet/ml/rng.hpp"

namespace test {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(PHISHDET_FIXTURE_DIR) / name; }
inline std::filesystem::path data_file(const std::string& name) { return std::filesystem::path(PHISHDET_DATA_DIR) / name; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("phishdet_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Random real-valued dataset with both classes present.
inline phishdet::Dataset random_dataset(phishdet::Rng& rng, std::size_t n, std::size_t d) {
  phishdet::Dataset data;
  data.features = phishdet::Matrix(n, d);
  for (double& v : data.features.values()) v = rng.uniform(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) data.labels.push_back(i < 2 ? static_cast<int>(i) : rng.bernoulli(0.5));
  return data;
}

// max_j |a_j - n_j| / max_j max(|a_j|, |n_j|)
inline double max_rel_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < analytic.size(); ++j) {
    diff = std::max(diff, std::abs(analytic[j] - numeric[j]));
    scale = std::max({scale, std::abs(analytic[j]), std::abs(numeric[j])});
  }
  return scale == 0.0 ? diff : diff / scale;
}

}  // namespace test
