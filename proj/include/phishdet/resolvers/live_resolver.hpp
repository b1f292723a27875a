#pragma once

#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "phishdet/resolvers/resolver.hpp"

namespace phishdet {

struct HttpResponse {
  int status = 0;
  std::optional<std::string> location;
  std::string body;
};

// Outbound requests made by LiveResolver. Implementations throw
// Error{ResolutionFailed} on timeouts and connection errors.
class Transport {
 public:
  virtual ~Transport() = default;
  // Single GET without following redirects.
  virtual HttpResponse get(const std::string& url, std::chrono::milliseconds timeout) = 0;
  virtual CertificateInfo peer_certificate(const std::string& host, std::chrono::milliseconds timeout) = 0;
};

struct LiveResolverOptions {
  std::chrono::milliseconds timeout{5000};
  // "{host}" is replaced by the queried host; the response body must be the
  // integer rank. Empty disables rank lookups (every host is unranked).
  std::string rank_endpoint;
  // RDAP endpoint; "{domain}" is replaced. The "registration" event gives the
  // creation date.
  std::string age_endpoint = "https://rdap.org/domain/{domain}";
  Timestamp reference_now{};
};

// Network-backed resolver. Every distinct request key (URL, host, domain) is
// sent at most once per instance; concurrent callers asking for the same key
// wait on the same in-flight request.
class LiveResolver final : public Resolver {
 public:
  LiveResolver(std::shared_ptr<Transport> transport, LiveResolverOptions options);

  RedirectResult resolve_redirects(std::string_view url, int max_hops = kDefaultMaxHops) const override;
  CertificateInfo fetch_certificate(std::string_view host) const override;
  TrafficRank lookup_traffic_rank(std::string_view host) const override;
  DomainAge lookup_domain_age(std::string_view domain) const override;

 private:
  template <typename T>
  using Cache = std::map<std::string, std::shared_future<T>>;

  template <typename T>
  T cached(Cache<T>& cache, const std::string& key, const std::function<T()>& fetch) const;

  HttpResponse get(const std::string& url) const;

  std::shared_ptr<Transport> transport_;
  LiveResolverOptions options_;
  mutable std::mutex mutex_;
  mutable Cache<HttpResponse> responses_;
  mutable Cache<CertificateInfo> certificates_;
};

// Transport over cpp-httplib and OpenSSL.
std::shared_ptr<Transport> make_network_transport();

}  // namespace phishdet
