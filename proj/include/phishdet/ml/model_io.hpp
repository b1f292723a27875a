#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phishdet/eval/preprocess.hpp"
#include "phishdet/ml/ann.hpp"
#include "phishdet/ml/logistic.hpp"
#include "phishdet/ml/svm.hpp"

namespace phishdet {

inline constexpr int kModelFormatVersion = 1;

using Model = std::variant<LogisticModel, AnnModel, SvmModel>;

// "lr", "ann" or "svm".
std::string_view model_kind(const Model& model) noexcept;

// A trained model plus the scaling fitted alongside it. Inputs to the
// functions below are raw (unscaled) feature rows.
struct ModelBundle {
  Model model;
  std::optional<Standardizer> standardizer;

  bool operator==(const ModelBundle&) const = default;
};

// JSON text; every real is written with 17 significant digits so reading it
// back reproduces the same doubles.
std::string serialize_model(const ModelBundle& bundle);
// Throws UnsupportedVersion or CorruptModelFile.
ModelBundle deserialize_model(std::string_view text);

void save_model(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_model(const std::filesystem::path& path);

// Probability for lr/ann, decision value for svm.
double model_score(const ModelBundle& bundle, std::span<const double> raw_row);
int model_predict(const ModelBundle& bundle, std::span<const double> raw_row);
std::vector<int> model_predict_all(const ModelBundle& bundle, const Dataset& raw);

}  // namespace phishdet
