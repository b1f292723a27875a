#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace phishdet {

struct FeatureConfig {
  std::vector<std::string> blacklist_keywords;
  std::vector<std::string> trusted_cas;
  std::vector<std::string> credible_domains;
  std::vector<std::string> shortener_hosts;
  std::vector<std::string> suspicious_extensions;
  std::int64_t rank_threshold = 150000;
  std::int64_t min_age_days = 365;
  // true: rank <= threshold counts as popular; false: rank < threshold.
  bool rank_threshold_inclusive = true;

  static FeatureConfig defaults();

  bool operator==(const FeatureConfig&) const = default;
};

// JSON object with the seven fields above (all required) and the optional
// "rank_threshold_inclusive". Unknown keys are rejected. Throws
// Error{InvalidConfig}.
FeatureConfig parse_feature_config(std::string_view json_text);
FeatureConfig load_feature_config(const std::filesystem::path& path);
std::string to_json(const FeatureConfig& config);

}  // namespace phishdet
