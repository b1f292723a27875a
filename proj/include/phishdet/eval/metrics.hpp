#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace phishdet {

// Positive class = phishing.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// standard: fp / (fp + tn). paper: fp / (tp + fn).
enum class PfaDenominator { standard, paper };

std::string_view to_string(PfaDenominator d) noexcept;
std::optional<PfaDenominator> parse_pfa_denominator(std::string_view name) noexcept;

struct Metrics {
  double p_d = 0.0;
  double p_fa = 0.0;
  double p_md = 0.0;
  double accuracy = 0.0;

  bool operator==(const Metrics&) const = default;
};

// Throws LengthMismatch on unequal lengths, SchemaMismatch on labels
// outside {0, 1}.
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

// p_md is 1 - p_d so the pair sums to exactly 1. Throws DegenerateTestSet
// when either class is absent.
Metrics compute_metrics(const ConfusionMatrix& cm, PfaDenominator pfa = PfaDenominator::standard);

}  // namespace phishdet
