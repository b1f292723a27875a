#include "phishdet/features/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "phishdet/error.hpp"
#include "phishdet/util/text.hpp"

namespace phishdet {
namespace {

using nlohmann::json;

std::vector<std::string> string_list(const json& root, const char* name) {
  if (!root.contains(name)) throw Error(Errc::InvalidConfig, std::string("missing '") + name + "'");
  const json& v = root.at(name);
  if (!v.is_array()) throw Error(Errc::InvalidConfig, std::string("'") + name + "' must be a list of strings");
  std::vector<std::string> out;
  for (const json& item : v) {
    if (!item.is_string()) throw Error(Errc::InvalidConfig, std::string("'") + name + "' must hold strings only");
    out.push_back(text::to_lower(text::trim(item.get<std::string>())));
  }
  return out;
}

std::int64_t positive_int(const json& root, const char* name) {
  if (!root.contains(name) || !root.at(name).is_number_integer() || root.at(name).get<std::int64_t>() <= 0) {
    throw Error(Errc::InvalidConfig, std::string("'") + name + "' must be a positive integer");
  }
  return root.at(name).get<std::int64_t>();
}

}  // namespace

FeatureConfig FeatureConfig::defaults() {
  FeatureConfig c;
  c.blacklist_keywords = {"click now",         "verify now",          "valid in 24h",
                          "update now",        "verify your account", "confirm your identity",
                          "account suspended", "urgent action required"};
  c.trusted_cas = {"godaddy", "comodo", "symantec", "digicert", "globalsign", "sectigo", "let's encrypt"};
  c.credible_domains = {"und.edu",   "microsoft.com", "office365.com", "dropbox.com",
                        "google.com", "apple.com",     "paypal.com",    "amazon.com"};
  c.shortener_hosts = {"goo.gl", "j.mp", "bit.ly", "tinyurl.com", "t.co", "ow.ly", "is.gd"};
  c.suspicious_extensions = {"exe", "dll", "scr", "bat"};
  c.rank_threshold = 150000;
  c.min_age_days = 365;
  c.rank_threshold_inclusive = true;
  return c;
}

FeatureConfig parse_feature_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::InvalidConfig, std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(Errc::InvalidConfig, "top level must be an object");
  for (const auto& [key, _] : root.items()) {
    static constexpr std::string_view kKnown[] = {
        "blacklist_keywords", "trusted_cas",  "credible_domains", "shortener_hosts", "suspicious_extensions",
        "rank_threshold",     "min_age_days", "rank_threshold_inclusive"};
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw Error(Errc::InvalidConfig, "unknown key '" + key + "'");
    }
  }
  FeatureConfig c;
  c.blacklist_keywords = string_list(root, "blacklist_keywords");
  c.trusted_cas = string_list(root, "trusted_cas");
  c.credible_domains = string_list(root, "credible_domains");
  c.shortener_hosts = string_list(root, "shortener_hosts");
  c.suspicious_extensions = string_list(root, "suspicious_extensions");
  for (std::string& ext : c.suspicious_extensions) {
    if (ext.starts_with('.')) ext.erase(0, 1);
  }
  c.rank_threshold = positive_int(root, "rank_threshold");
  c.min_age_days = positive_int(root, "min_age_days");
  if (root.contains("rank_threshold_inclusive")) {
    if (!root.at("rank_threshold_inclusive").is_boolean()) {
      throw Error(Errc::InvalidConfig, "'rank_threshold_inclusive' must be a boolean");
    }
    c.rank_threshold_inclusive = root.at("rank_threshold_inclusive").get<bool>();
  }
  return c;
}

FeatureConfig load_feature_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open feature config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_feature_config(buf.str());
}

std::string to_json(const FeatureConfig& c) {
  json root = {
      {"blacklist_keywords", c.blacklist_keywords},
      {"trusted_cas", c.trusted_cas},
      {"credible_domains", c.credible_domains},
      {"shortener_hosts", c.shortener_hosts},
      {"suspicious_extensions", c.suspicious_extensions},
      {"rank_threshold", c.rank_threshold},
      {"min_age_days", c.min_age_days},
      {"rank_threshold_inclusive", c.rank_threshold_inclusive},
  };
  return root.dump(2) + "\n";
}

}  // namespace phishdet
