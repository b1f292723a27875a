#include "phishdet/features/features.hpp"

#include <algorithm>

#include "phishdet/email/url.hpp"
#include "phishdet/error.hpp"
#include "phishdet/util/text.hpp"

namespace phishdet {
namespace {

template <typename Pred>
bool any_link(const ParsedEmail& email, Pred pred) {
  return std::any_of(email.links.begin(), email.links.end(), pred);
}

bool in_list(const std::vector<std::string>& list, std::string_view value) {
  return std::any_of(list.begin(), list.end(), [&](const std::string& item) { return text::iequals(item, value); });
}

}  // namespace

int f1_ssl(const ParsedEmail& email, const FeatureConfig&, const Resolver&) {
  return any_link(email, [](const Link& l) { return l.scheme == Scheme::http; });
}

int f2_ca(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver) {
  return any_link(email, [&](const Link& l) {
    if (l.scheme != Scheme::https) return false;
    const CertificateInfo cert = resolver.fetch_certificate(l.host);
    if (!cert.present || cert.self_signed || !cert.issuer_name) return true;
    return std::none_of(config.trusted_cas.begin(), config.trusted_cas.end(),
                        [&](const std::string& ca) { return text::icontains(*cert.issuer_name, ca); });
  });
}

int f3_blacklist(const ParsedEmail& email, const FeatureConfig& config, const Resolver&) {
  const std::string subject = text::fold_and_collapse(email.subject);
  const std::string body = text::fold_and_collapse(email.body_text);
  return std::any_of(config.blacklist_keywords.begin(), config.blacklist_keywords.end(), [&](const std::string& kw) {
    const std::string phrase = text::fold_and_collapse(kw);
    return !phrase.empty() && (subject.find(phrase) != std::string::npos || body.find(phrase) != std::string::npos);
  });
}

int f4_redirect(const ParsedEmail& email, const FeatureConfig&, const Resolver& resolver) {
  return any_link(email, [&](const Link& l) {
    try {
      const RedirectResult r = resolver.resolve_redirects(l.raw_url, kDefaultMaxHops);
      return canonicalize_url(r.final_url) != canonicalize_url(r.requested_url);
    } catch (const Error&) {
      // unresolvable or too many hops
      return true;
    }
  });
}

int f5_hidden(const ParsedEmail& email, const FeatureConfig& config, const Resolver&) {
  return any_link(email, [&](const Link& l) {
    return l.wrapped_in_image_or_text || in_list(config.shortener_hosts, l.host);
  });
}

int f6_clear_ip(const ParsedEmail& email, const FeatureConfig&, const Resolver&) {
  return any_link(email, [](const Link& l) { return l.host_is_ip_literal; });
}

int f7_traffic(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver) {
  if (email.links.empty()) return 0;
  const bool any_popular = any_link(email, [&](const Link& l) {
    const TrafficRank r = resolver.lookup_traffic_rank(l.host);
    if (!r.rank) return false;
    return config.rank_threshold_inclusive ? *r.rank <= config.rank_threshold : *r.rank < config.rank_threshold;
  });
  return !any_popular;
}

int f8_age(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver) {
  if (email.links.empty()) return 0;
  const bool any_established = any_link(email, [&](const Link& l) {
    const DomainAge age = resolver.lookup_domain_age(l.host);
    return age.age_days && *age.age_days >= config.min_age_days;
  });
  return !any_established;
}

int f9_sender(const ParsedEmail& email, const FeatureConfig& config, const Resolver&) {
  return !in_list(config.credible_domains, email.sender_domain);
}

int f10_attachment(const ParsedEmail& email, const FeatureConfig& config, const Resolver&) {
  return std::any_of(email.attachments.begin(), email.attachments.end(),
                     [&](const Attachment& a) { return in_list(config.suspicious_extensions, a.extension); });
}

FeatureVector extract_vector(const ParsedEmail& email, const FeatureConfig& config, const Resolver& resolver) {
  using Rule = int (*)(const ParsedEmail&, const FeatureConfig&, const Resolver&);
  static constexpr std::array<Rule, kFeatureCount> kRules{f1_ssl,    f2_ca,       f3_blacklist, f4_redirect, f5_hidden,
                                                          f6_clear_ip, f7_traffic, f8_age,       f9_sender,   f10_attachment};
  FeatureVector v;
  for (std::size_t i = 0; i < kFeatureCount; ++i) v.values[i] = static_cast<std::uint8_t>(kRules[i](email, config, resolver));
  return v;
}

}  // namespace phishdet
