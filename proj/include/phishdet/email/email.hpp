#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phishdet/email/url.hpp"
#include "phishdet/util/time.hpp"

namespace phishdet {

struct RawEmail {
  std::string source_path;
  std::string bytes;
};

struct Link {
  std::string raw_url;
  Url url;
  Scheme scheme = Scheme::other;
  std::string host;
  bool host_is_ip_literal = false;
  // Visible anchor content (tags stripped); unset for links found in plain text.
  std::optional<std::string> display_text;
  // The anchor shows an image, or text that does not name the target host.
  bool wrapped_in_image_or_text = false;

  bool operator==(const Link&) const = default;
};

struct Attachment {
  std::string filename;
  std::string extension;

  bool operator==(const Attachment&) const = default;
};

Attachment make_attachment(std::string filename);

struct ParsedEmail {
  std::string sender_address;
  std::string sender_domain;
  std::string subject;
  std::optional<Timestamp> date;
  std::string body_text;
  std::vector<Link> links;
  std::vector<Attachment> attachments;
  // Value of an "X-Phish-Label" header when present, lowercased. Used only to
  // label fixture mailboxes.
  std::optional<std::string> label_hint;

  bool operator==(const ParsedEmail&) const = default;
};

// Throws Error{MalformedEmail} when the header/body separator or a usable
// From address is missing. Line endings are normalized to LF first.
ParsedEmail parse_email(const RawEmail& raw);

// Every absolute http/https URL in `body`, once each, in document order.
// HTML anchors carry their display text; URLs inside other tags (img src,
// stylesheet links) are not reported.
std::vector<Link> extract_links(std::string_view body);

// RFC 2047 encoded-words ("=?utf-8?B?...?=") decoded to UTF-8. Anything that
// cannot be decoded is kept as-is.
std::string decode_header_words(std::string_view value);

std::string decode_base64(std::string_view in);
std::string decode_quoted_printable(std::string_view in);

}  // namespace phishdet
