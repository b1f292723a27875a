#include "phishdet/resolvers/live_resolver.hpp"

#include <charconv>

#include "json.hpp"
#include "phishdet/email/url.hpp"
#include "phishdet/error.hpp"
#include "phishdet/util/text.hpp"

namespace phishdet {
namespace {

std::string substitute(std::string pattern, std::string_view placeholder, std::string_view value) {
  for (auto pos = pattern.find(placeholder); pos != std::string::npos; pos = pattern.find(placeholder, pos)) {
    pattern.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
  return pattern;
}

// Location headers may be relative to the requesting URL.
std::string resolve_location(const std::string& base, const std::string& location) {
  if (parse_url(location)) return location;
  const auto url = parse_url(base);
  if (!url) return location;
  std::string origin = url->scheme + "://" + url->host;
  if (url->port) origin += ":" + std::to_string(*url->port);
  if (location.starts_with("//")) return url->scheme + ":" + location;
  if (location.starts_with("/")) return origin + location;
  const std::string path = url->tail.substr(0, url->tail.find_first_of("?#"));
  const auto slash = path.rfind('/');
  return origin + (slash == std::string::npos ? "/" : path.substr(0, slash + 1)) + location;
}

}  // namespace

LiveResolver::LiveResolver(std::shared_ptr<Transport> transport, LiveResolverOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {}

template <typename T>
T LiveResolver::cached(Cache<T>& cache, const std::string& key, const std::function<T()>& fetch) const {
  std::shared_future<T> future;
  std::promise<T> promise;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    auto it = cache.find(key);
    if (it == cache.end()) {
      future = promise.get_future().share();
      cache.emplace(key, future);
      owner = true;
    } else {
      future = it->second;
    }
  }
  if (owner) {
    try {
      promise.set_value(fetch());
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

HttpResponse LiveResolver::get(const std::string& url) const {
  return cached<HttpResponse>(responses_, url, [&] { return transport_->get(url, options_.timeout); });
}

RedirectResult LiveResolver::resolve_redirects(std::string_view url, int max_hops) const {
  RedirectResult result{std::string(url), std::string(url), 0};
  std::string current(url);
  while (true) {
    HttpResponse response;
    try {
      response = get(current);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(Errc::ResolutionFailed, current + ": " + e.what());
    }
    const bool redirect = response.status >= 300 && response.status < 400 && response.location;
    if (!redirect) return result;
    const std::string next = resolve_location(current, *response.location);
    if (canonicalize_url(next) == canonicalize_url(current)) return result;
    if (result.hop_count == max_hops) {
      throw Error(Errc::TooManyHops, std::string(url) + " exceeds " + std::to_string(max_hops) + " hops");
    }
    ++result.hop_count;
    result.final_url = next;
    current = next;
  }
}

CertificateInfo LiveResolver::fetch_certificate(std::string_view host) const {
  try {
    return cached<CertificateInfo>(certificates_, text::to_lower(host), [&] {
      return transport_->peer_certificate(text::to_lower(host), options_.timeout);
    });
  } catch (const std::exception&) {
    return {};
  }
}

TrafficRank LiveResolver::lookup_traffic_rank(std::string_view host) const {
  if (options_.rank_endpoint.empty()) return {};
  try {
    const HttpResponse r = get(substitute(options_.rank_endpoint, "{host}", text::to_lower(host)));
    if (r.status != 200) return {};
    const std::string_view body = text::trim(r.body);
    std::int64_t rank = 0;
    const auto res = std::from_chars(body.data(), body.data() + body.size(), rank);
    if (res.ec != std::errc{} || res.ptr != body.data() + body.size() || rank < 1) return {};
    return TrafficRank{rank};
  } catch (const std::exception&) {
    return {};
  }
}

DomainAge LiveResolver::lookup_domain_age(std::string_view domain) const {
  if (options_.age_endpoint.empty()) return {};
  try {
    const HttpResponse r = get(substitute(options_.age_endpoint, "{domain}", text::to_lower(domain)));
    if (r.status != 200) return {};
    const auto doc = nlohmann::json::parse(r.body);
    for (const auto& event : doc.value("events", nlohmann::json::array())) {
      if (event.value("eventAction", "") == "registration") {
        return make_domain_age(parse_iso8601(event.value("eventDate", "").substr(0, 19) + "Z"),
                               options_.reference_now);
      }
    }
  } catch (const std::exception&) {
  }
  return {};
}

}  // namespace phishdet
