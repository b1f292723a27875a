#include "phishdet/eval/metrics.hpp"

#include <string>

#include "phishdet/error.hpp"

namespace phishdet {

std::string_view to_string(PfaDenominator d) noexcept { return d == PfaDenominator::paper ? "paper" : "standard"; }

std::optional<PfaDenominator> parse_pfa_denominator(std::string_view name) noexcept {
  if (name == "standard") return PfaDenominator::standard;
  if (name == "paper") return PfaDenominator::paper;
  return std::nullopt;
}

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                          std::to_string(labels.size()) + " labels");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i];
    const int y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1)) {
      throw Error(Errc::SchemaMismatch, "entry " + std::to_string(i) + " is not a 0/1 label");
    }
    if (y == 1) {
      (p == 1 ? cm.tp : cm.fn)++;
    } else {
      (p == 1 ? cm.fp : cm.tn)++;
    }
  }
  return cm;
}

Metrics compute_metrics(const ConfusionMatrix& cm, PfaDenominator pfa) {
  const std::size_t positives = cm.tp + cm.fn;
  const std::size_t negatives = cm.fp + cm.tn;
  if (positives == 0 || negatives == 0) {
    throw Error(Errc::DegenerateTestSet, "test set needs both classes (" + std::to_string(positives) + " phishing, " +
                                             std::to_string(negatives) + " legitimate)");
  }
  Metrics m;
  m.p_d = static_cast<double>(cm.tp) / static_cast<double>(positives);
  m.p_md = 1.0 - m.p_d;
  const std::size_t fa_den = pfa == PfaDenominator::paper ? positives : negatives;
  m.p_fa = static_cast<double>(cm.fp) / static_cast<double>(fa_den);
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  return m;
}

}  // namespace phishdet
