#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "phishdet/util/time.hpp"

namespace phishdet {

inline constexpr int kDefaultMaxHops = 10;

struct RedirectResult {
  std::string requested_url;
  std::string final_url;
  int hop_count = 0;

  bool operator==(const RedirectResult&) const = default;
};

struct CertificateInfo {
  bool present = false;
  std::optional<std::string> issuer_name;
  bool self_signed = false;

  bool operator==(const CertificateInfo&) const = default;
};

// Unset rank means unranked or unknown.
struct TrafficRank {
  std::optional<std::int64_t> rank;

  bool operator==(const TrafficRank&) const = default;
};

struct DomainAge {
  std::optional<Timestamp> creation_date;
  std::optional<std::int64_t> age_days;

  bool operator==(const DomainAge&) const = default;
};

// Whole days between creation and the reference time, never negative.
DomainAge make_domain_age(std::optional<Timestamp> creation_date, Timestamp reference_now);

// The four network questions asked by the link features. Implementations
// answer "unknown" (absent certificate, rank or age) instead of failing;
// only resolve_redirects throws, with Errc::ResolutionFailed or
// Errc::TooManyHops.
class Resolver {
 public:
  virtual ~Resolver() = default;

  virtual RedirectResult resolve_redirects(std::string_view url, int max_hops = kDefaultMaxHops) const = 0;
  virtual CertificateInfo fetch_certificate(std::string_view host) const = 0;
  virtual TrafficRank lookup_traffic_rank(std::string_view host) const = 0;
  virtual DomainAge lookup_domain_age(std::string_view domain) const = 0;
};

}  // namespace phishdet
