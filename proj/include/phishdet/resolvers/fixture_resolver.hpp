#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "phishdet/resolvers/resolver.hpp"

namespace phishdet {

// Offline answers for the resolver questions, loaded from JSON:
//
//   {
//     "reference_now": "2021-06-01",
//     "redirects":    { "http://s/1": "http://evil/2", "http://down/": null },
//     "certificates": { "good.com": {"issuer": "Comodo", "self_signed": false},
//                       "nocert.com": null },
//     "ranks":        { "popular.com": 512, "gone.com": null },
//     "ages":         { "old.com": "2015-03-01", "private.com": null }
//   }
//
// Redirect entries are single hops and are followed until a URL has no entry
// or maps to itself; a null target means the URL cannot be resolved. A null
// certificate, rank or age records an explicit "unknown". Unknown keys at any
// level are rejected.
struct ResolverFixture {
  Timestamp reference_now{};
  std::map<std::string, std::optional<std::string>> redirects;
  std::map<std::string, CertificateInfo> certificates;
  std::map<std::string, TrafficRank> ranks;
  std::map<std::string, std::optional<Timestamp>> ages;
};

ResolverFixture parse_resolver_fixture(std::string_view json_text);
ResolverFixture load_resolver_fixture(const std::filesystem::path& path);

class FixtureResolver final : public Resolver {
 public:
  explicit FixtureResolver(ResolverFixture fixture);

  RedirectResult resolve_redirects(std::string_view url, int max_hops = kDefaultMaxHops) const override;
  CertificateInfo fetch_certificate(std::string_view host) const override;
  // Rank and age lookups fall back to parent domains ("www.a.com" -> "a.com").
  TrafficRank lookup_traffic_rank(std::string_view host) const override;
  DomainAge lookup_domain_age(std::string_view domain) const override;

  const ResolverFixture& fixture() const noexcept { return fixture_; }

 private:
  ResolverFixture fixture_;
};

}  // namespace phishdet
