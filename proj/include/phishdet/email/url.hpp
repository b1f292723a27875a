#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace phishdet {

enum class Scheme { http, https, other };

// Components of an absolute "scheme://authority..." URL. Scheme and host are
// stored lowercased; everything after the authority is kept verbatim in
// `tail` (path, query, fragment).
struct Url {
  std::string scheme;
  std::string userinfo;
  std::string host;
  std::optional<std::uint16_t> port;
  std::string tail;

  Scheme scheme_kind() const noexcept;
  bool operator==(const Url&) const = default;
};

std::optional<Url> parse_url(std::string_view text);
std::string to_string(const Url& url);

// Lowercased scheme and host, default port dropped, empty path written as "/".
// Unparseable input is returned unchanged.
std::string canonicalize_url(std::string_view text);

// Dotted quad ("50.10.125.26") or bracketed numeric address ("[::1]").
bool is_ip_literal(std::string_view host) noexcept;

}  // namespace phishdet
