#include "phishdet/resolvers/fixture_resolver.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "phishdet/email/url.hpp"
#include "phishdet/error.hpp"
#include "phishdet/util/text.hpp"

namespace phishdet {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::InvalidFixture, what); }

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) bad("unknown key '" + key + "' in " + where);
  }
}

const json& object_field(const json& root, const char* name) {
  if (!root.contains(name)) bad(std::string("missing '") + name + "'");
  const json& v = root.at(name);
  if (!v.is_object()) bad(std::string("'") + name + "' must be an object");
  return v;
}

Timestamp parse_date(const json& v, const std::string& where) {
  if (!v.is_string()) bad(where + " must be an ISO-8601 date string");
  auto t = parse_iso8601(v.get<std::string>());
  if (!t) bad(where + " is not an ISO-8601 date: " + v.get<std::string>());
  return *t;
}

// Walks "a.b.c" -> "b.c" (stops at two labels) until `table` has a key.
template <typename Map>
auto find_domain(const Map& table, std::string_view host) -> decltype(table.find(std::string{})) {
  std::string key = text::to_lower(host);
  while (true) {
    if (auto it = table.find(key); it != table.end()) return it;
    const auto dot = key.find('.');
    if (dot == std::string::npos || key.find('.', dot + 1) == std::string::npos) return table.end();
    key.erase(0, dot + 1);
  }
}

}  // namespace

ResolverFixture parse_resolver_fixture(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) bad("top level must be an object");
  reject_unknown_keys(root, {"reference_now", "redirects", "certificates", "ranks", "ages"}, "fixture");

  ResolverFixture fx;
  if (!root.contains("reference_now")) bad("missing 'reference_now'");
  fx.reference_now = parse_date(root.at("reference_now"), "reference_now");

  for (const auto& [url, target] : object_field(root, "redirects").items()) {
    if (target.is_null()) {
      fx.redirects[canonicalize_url(url)] = std::nullopt;
    } else if (target.is_string()) {
      fx.redirects[canonicalize_url(url)] = target.get<std::string>();
    } else {
      bad("redirect target for '" + url + "' must be a string or null");
    }
  }

  for (const auto& [host, cert] : object_field(root, "certificates").items()) {
    CertificateInfo info;
    if (cert.is_object()) {
      reject_unknown_keys(cert, {"issuer", "self_signed"}, "certificate '" + host + "'");
      info.present = true;
      if (cert.contains("issuer") && !cert.at("issuer").is_null()) {
        if (!cert.at("issuer").is_string()) bad("issuer of '" + host + "' must be a string");
        info.issuer_name = cert.at("issuer").get<std::string>();
      }
      if (cert.contains("self_signed")) {
        if (!cert.at("self_signed").is_boolean()) bad("self_signed of '" + host + "' must be a boolean");
        info.self_signed = cert.at("self_signed").get<bool>();
      }
    } else if (!cert.is_null()) {
      bad("certificate for '" + host + "' must be an object or null");
    }
    fx.certificates[text::to_lower(host)] = info;
  }

  for (const auto& [host, rank] : object_field(root, "ranks").items()) {
    TrafficRank r;
    if (rank.is_number_integer()) {
      if (rank.get<std::int64_t>() < 1) bad("rank for '" + host + "' must be >= 1");
      r.rank = rank.get<std::int64_t>();
    } else if (!rank.is_null()) {
      bad("rank for '" + host + "' must be an integer or null");
    }
    fx.ranks[text::to_lower(host)] = r;
  }

  for (const auto& [domain, created] : object_field(root, "ages").items()) {
    fx.ages[text::to_lower(domain)] =
        created.is_null() ? std::nullopt : std::optional{parse_date(created, "age of '" + domain + "'")};
  }
  return fx;
}

ResolverFixture load_resolver_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open resolver fixture " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_resolver_fixture(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

FixtureResolver::FixtureResolver(ResolverFixture fixture) : fixture_(std::move(fixture)) {}

RedirectResult FixtureResolver::resolve_redirects(std::string_view url, int max_hops) const {
  RedirectResult result{std::string(url), std::string(url), 0};
  std::string current = canonicalize_url(url);
  while (true) {
    const auto it = fixture_.redirects.find(current);
    if (it == fixture_.redirects.end()) return result;
    if (!it->second) throw Error(Errc::ResolutionFailed, "fixture marks " + current + " unresolvable");
    const std::string next = canonicalize_url(*it->second);
    if (next == current) return result;
    if (result.hop_count == max_hops) {
      throw Error(Errc::TooManyHops, std::string(url) + " exceeds " + std::to_string(max_hops) + " hops");
    }
    ++result.hop_count;
    result.final_url = *it->second;
    current = next;
  }
}

CertificateInfo FixtureResolver::fetch_certificate(std::string_view host) const {
  const auto it = fixture_.certificates.find(text::to_lower(host));
  return it == fixture_.certificates.end() ? CertificateInfo{} : it->second;
}

TrafficRank FixtureResolver::lookup_traffic_rank(std::string_view host) const {
  const auto it = find_domain(fixture_.ranks, host);
  return it == fixture_.ranks.end() ? TrafficRank{} : it->second;
}

DomainAge FixtureResolver::lookup_domain_age(std::string_view domain) const {
  const auto it = find_domain(fixture_.ages, domain);
  return make_domain_age(it == fixture_.ages.end() ? std::nullopt : it->second, fixture_.reference_now);
}

}  // namespace phishdet
