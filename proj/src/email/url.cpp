#include "phishdet/email/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "phishdet/util/text.hpp"

namespace phishdet {
namespace {

bool is_scheme_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

bool is_host_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_' || c == '%' ||
         static_cast<unsigned char>(c) >= 0x80;
}

}  // namespace

Scheme Url::scheme_kind() const noexcept {
  if (scheme == "http") return Scheme::http;
  if (scheme == "https") return Scheme::https;
  return Scheme::other;
}

std::optional<Url> parse_url(std::string_view text) {
  const auto colon = text.find("://");
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  const std::string_view scheme = text.substr(0, colon);
  if (!std::isalpha(static_cast<unsigned char>(scheme.front())) ||
      !std::all_of(scheme.begin(), scheme.end(), is_scheme_char)) {
    return std::nullopt;
  }

  Url url;
  url.scheme = text::to_lower(scheme);
  const std::string_view rest = text.substr(colon + 3);
  const auto authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  url.tail = authority_end == std::string_view::npos ? std::string{} : std::string(rest.substr(authority_end));

  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    url.userinfo = std::string(authority.substr(0, at));
    authority.remove_prefix(at + 1);
  }

  std::string_view host;
  std::string_view port;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    host = authority.substr(0, close + 1);
    const std::string_view after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') return std::nullopt;
      port = after.substr(1);
    }
  } else {
    const auto pcolon = authority.find(':');
    host = authority.substr(0, pcolon);
    if (pcolon != std::string_view::npos) port = authority.substr(pcolon + 1);
    if (!std::all_of(host.begin(), host.end(), is_host_char)) return std::nullopt;
  }
  if (host.empty()) return std::nullopt;
  url.host = text::to_lower(host);

  if (!port.empty()) {
    unsigned value = 0;
    const auto res = std::from_chars(port.data(), port.data() + port.size(), value);
    if (res.ec != std::errc{} || res.ptr != port.data() + port.size() || value > 65535) return std::nullopt;
    url.port = static_cast<std::uint16_t>(value);
  }
  return url;
}

std::string to_string(const Url& url) {
  std::string out = url.scheme + "://";
  if (!url.userinfo.empty()) out += url.userinfo + "@";
  out += url.host;
  if (url.port) out += ":" + std::to_string(*url.port);
  out += url.tail;
  return out;
}

std::string canonicalize_url(std::string_view text) {
  auto url = parse_url(text);
  if (!url) return std::string(text);
  if ((url->scheme == "http" && url->port == 80) || (url->scheme == "https" && url->port == 443)) {
    url->port.reset();
  }
  if (url->tail.empty() || url->tail.front() != '/') url->tail.insert(0, "/");
  return to_string(*url);
}

bool is_ip_literal(std::string_view host) noexcept {
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    const std::string_view inner = host.substr(1, host.size() - 2);
    return !inner.empty() && std::all_of(inner.begin(), inner.end(), [](char c) {
      return std::isxdigit(static_cast<unsigned char>(c)) || c == ':' || c == '.';
    });
  }
  const auto parts = text::split(host, '.');
  if (parts.size() != 4) return false;
  return std::all_of(parts.begin(), parts.end(), [](std::string_view p) {
    if (p.empty() || p.size() > 3) return false;
    unsigned v = 0;
    const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
    return res.ec == std::errc{} && res.ptr == p.data() + p.size() && v <= 255;
  });
}

}  // namespace phishdet
