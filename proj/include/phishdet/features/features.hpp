#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "phishdet/email/email.hpp"
#include "phishdet/features/config.hpp"
#include "phishdet/resolvers/resolver.hpp"

namespace phishdet {

inline constexpr std::size_t kFeatureCount = 10;

enum class Label : int { legitimate = 0, phishing = 1 };

// Column order of every feature matrix and CSV file.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "f1_no_https",    "f2_untrusted_ca",  "f3_blacklist",        "f4_redirect",     "f5_hidden_link",
    "f6_ip_literal", "f7_low_traffic",   "f8_young_domain",     "f9_untrusted_sender", "f10_bad_attachment",
};

// Ten indicators, 1 meaning the suspicious condition of that feature fired.
struct FeatureVector {
  std::array<std::uint8_t, kFeatureCount> values{};
  std::optional<Label> label;

  int operator[](std::size_t i) const { return values.at(i); }
  bool operator==(const FeatureVector&) const = default;
};

// Individual rules, each returning 0 or 1. Links-based rules are 0 when the
// email has no links.

// Some link uses plain http.
int f1_ssl(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);
// Some https link has no certificate, a self-signed one, or an issuer outside
// trusted_cas (case-insensitive substring).
int f2_ca(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);
// Subject or body contains a blacklist phrase (case-insensitive substring).
int f3_blacklist(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);
// Some link lands elsewhere, or cannot be resolved.
int f4_redirect(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);
// Some link goes through a shortener or hides behind an image or text.
int f5_hidden(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);
// Some link host is an IP literal.
int f6_clear_ip(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);
// No linked host is ranked within rank_threshold.
int f7_traffic(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);
// No linked domain is known to be at least min_age_days old.
int f8_age(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);
// Sender domain is not in credible_domains.
int f9_sender(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);
// Some attachment has a suspicious extension.
int f10_attachment(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);

// All ten rules in column order; label left unset.
FeatureVector extract_vector(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver);

}  // namespace phishdet
