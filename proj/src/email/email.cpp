#include "phishdet/email/email.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "phishdet/error.hpp"
#include "phishdet/util/text.hpp"

namespace phishdet {
namespace {

constexpr int kMaxMimeDepth = 8;

using HeaderList = std::vector<std::pair<std::string, std::string>>;

std::string normalize_newlines(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
    } else {
      out.push_back(in[i]);
    }
  }
  return out;
}

HeaderList parse_headers(std::string_view block) {
  HeaderList headers;
  for (std::string_view line : text::split(block, '\n')) {
    if (line.empty()) continue;
    if ((line.front() == ' ' || line.front() == '\t') && !headers.empty()) {
      headers.back().second += ' ';
      headers.back().second += text::trim(line);
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    headers.emplace_back(text::to_lower(text::trim(line.substr(0, colon))),
                         std::string(text::trim(line.substr(colon + 1))));
  }
  return headers;
}

const std::string* find_header(const HeaderList& headers, std::string_view name) {
  for (const auto& [key, value] : headers) {
    if (key == name) return &value;
  }
  return nullptr;
}

// Splits "head\n\nbody". A part that starts with a blank line has no headers.
std::optional<std::pair<std::string_view, std::string_view>> split_head_body(std::string_view s) {
  if (!s.empty() && s.front() == '\n') return std::pair{std::string_view{}, s.substr(1)};
  const auto sep = s.find("\n\n");
  if (sep == std::string_view::npos) return std::nullopt;
  return std::pair{s.substr(0, sep), s.substr(sep + 2)};
}

struct ContentType {
  std::string type = "text/plain";
  std::vector<std::pair<std::string, std::string>> params;

  std::string param(std::string_view name) const {
    for (const auto& [k, v] : params) {
      if (k == name) return v;
    }
    return {};
  }
};

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

// "type/sub; a=b; c="d e"". RFC 2231 "name*=charset''value" is decoded into
// "name" when the plain form is absent.
ContentType parse_structured(std::string_view value) {
  ContentType ct;
  std::size_t i = value.find(';');
  ct.type = text::to_lower(text::trim(value.substr(0, i)));
  while (i != std::string_view::npos && i < value.size()) {
    ++i;
    const auto eq = value.find('=', i);
    if (eq == std::string_view::npos) break;
    std::string name = text::to_lower(text::trim(value.substr(i, eq - i)));
    std::size_t j = eq + 1;
    while (j < value.size() && (value[j] == ' ' || value[j] == '\t')) ++j;
    std::string param_value;
    if (j < value.size() && value[j] == '"') {
      ++j;
      while (j < value.size() && value[j] != '"') {
        if (value[j] == '\\' && j + 1 < value.size()) ++j;
        param_value.push_back(value[j++]);
      }
      i = value.find(';', j);
    } else {
      i = value.find(';', j);
      param_value = std::string(text::trim(value.substr(j, i == std::string_view::npos ? i : i - j)));
    }
    if (name.ends_with('*')) {
      name.pop_back();
      if (const auto q = param_value.find("''"); q != std::string::npos) {
        param_value = percent_decode(std::string_view(param_value).substr(q + 2));
      }
    }
    ct.params.emplace_back(std::move(name), std::move(param_value));
  }
  return ct;
}

std::string to_utf8(std::string_view bytes, std::string_view charset) {
  const std::string cs = text::to_lower(charset);
  if (cs == "iso-8859-1" || cs == "latin1" || cs == "iso-8859-15" || cs == "windows-1252" ||
      cs == "cp1252") {
    return text::latin1_to_utf8(bytes);
  }
  return text::sanitize_utf8(bytes);
}

std::string decode_transfer(std::string_view body, std::string_view encoding) {
  const std::string enc = text::to_lower(text::trim(encoding));
  if (enc == "base64") return decode_base64(body);
  if (enc == "quoted-printable") return decode_quoted_printable(body);
  return std::string(body);
}

bool is_tag_start(std::string_view s, std::size_t i) {
  if (i + 1 >= s.size()) return false;
  const char c = s[i + 1];
  if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '/' || c == '!')) return false;
  const std::string_view after = s.substr(i + 1);
  return !text::istarts_with(after, "http://") && !text::istarts_with(after, "https://");
}

// Index one past the '>' closing the tag opened at `i`; quoted attribute
// values may contain '>'.
std::size_t skip_tag(std::string_view s, std::size_t i) {
  if (s.substr(i).starts_with("<!--")) {
    const auto end = s.find("-->", i + 4);
    return end == std::string_view::npos ? s.size() : end + 3;
  }
  char quote = 0;
  for (std::size_t j = i + 1; j < s.size(); ++j) {
    const char c = s[j];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return j + 1;
    }
  }
  return s.size();
}

std::string strip_tags(std::string_view html) {
  std::string out;
  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] == '<' && is_tag_start(html, i)) {
      const std::size_t end = skip_tag(html, i);
      const std::string tag = text::to_lower(html.substr(i, std::min<std::size_t>(end - i, 8)));
      std::string_view hidden_block;
      if (tag.starts_with("<script")) hidden_block = "</script";
      if (tag.starts_with("<style")) hidden_block = "</style";
      if (hidden_block.empty()) {
        out.push_back(' ');
        i = end;
        continue;
      }
      // script/style bodies are not visible text
      const auto close = text::to_lower(html.substr(end)).find(hidden_block);
      i = close == std::string::npos ? html.size() : skip_tag(html, end + close);
    } else {
      out.push_back(html[i++]);
    }
  }
  return text::decode_html_entities(out);
}

std::optional<std::string> tag_attribute(std::string_view tag, std::string_view name) {
  // tag is "<a ...>"; attributes are scanned left to right.
  std::size_t i = 1;
  while (i < tag.size() && std::isalnum(static_cast<unsigned char>(tag[i]))) ++i;
  while (i < tag.size()) {
    while (i < tag.size() && (std::isspace(static_cast<unsigned char>(tag[i])) || tag[i] == '/')) ++i;
    const std::size_t name_start = i;
    while (i < tag.size() && tag[i] != '=' && tag[i] != '>' && !std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
    const std::string_view attr = tag.substr(name_start, i - name_start);
    if (attr.empty()) {
      ++i;
      continue;
    }
    while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
    std::string value;
    if (i < tag.size() && tag[i] == '=') {
      ++i;
      while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
      if (i < tag.size() && (tag[i] == '"' || tag[i] == '\'')) {
        const char q = tag[i++];
        const auto end = tag.find(q, i);
        value = std::string(tag.substr(i, end == std::string_view::npos ? tag.size() - i : end - i));
        i = end == std::string_view::npos ? tag.size() : end + 1;
      } else {
        const std::size_t vstart = i;
        while (i < tag.size() && tag[i] != '>' && !std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
        value = std::string(tag.substr(vstart, i - vstart));
      }
    }
    if (text::iequals(attr, name)) return value;
  }
  return std::nullopt;
}

std::optional<Link> make_link(std::string_view raw) {
  auto url = parse_url(raw);
  if (!url) return std::nullopt;
  const Scheme scheme = url->scheme_kind();
  if (scheme == Scheme::other) return std::nullopt;
  Link link;
  link.raw_url = std::string(raw);
  link.scheme = scheme;
  link.host = url->host;
  link.host_is_ip_literal = is_ip_literal(link.host);
  link.url = std::move(*url);
  return link;
}

bool is_url_terminator(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u <= 0x20 || u == 0x7F || c == '<' || c == '>' || c == '"' || c == '\'' || c == '`' ||
         c == '{' || c == '}' || c == '|' || c == '\\' || c == '^';
}

// Trailing sentence punctuation is not part of a URL written in prose.
std::string_view trim_url_tail(std::string_view url) {
  while (!url.empty()) {
    const char c = url.back();
    if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '*') {
      url.remove_suffix(1);
    } else if (c == ')' && std::count(url.begin(), url.end(), '(') < std::count(url.begin(), url.end(), ')')) {
      url.remove_suffix(1);
    } else if (c == ']' && url.find('[') == std::string_view::npos) {
      url.remove_suffix(1);
    } else {
      break;
    }
  }
  return url;
}

// Host named by an anchor's visible text, if the text reads as a URL or a
// bare domain.
std::optional<std::string> displayed_host(std::string_view shown) {
  shown = text::trim(shown);
  if (shown.empty() || shown.find(' ') != std::string_view::npos) return std::nullopt;
  if (auto url = parse_url(shown)) return url->host;
  const std::string_view host = shown.substr(0, shown.find_first_of("/?#"));
  if (host.find('.') == std::string_view::npos) return std::nullopt;
  return text::to_lower(host);
}

void merge_link(std::vector<Link>& links, Link link) {
  auto it = std::find_if(links.begin(), links.end(), [&](const Link& l) { return l.raw_url == link.raw_url; });
  if (it == links.end()) {
    links.push_back(std::move(link));
    return;
  }
  it->wrapped_in_image_or_text = it->wrapped_in_image_or_text || link.wrapped_in_image_or_text;
  if (!it->display_text && link.display_text) it->display_text = std::move(link.display_text);
}

struct TextPart {
  bool html = false;
  std::string content;
};

struct MimeWalk {
  std::vector<TextPart> text_parts;
  std::vector<Attachment> attachments;
};

void walk_part(const HeaderList& headers, std::string_view body, int depth, MimeWalk& out) {
  const std::string* ct_header = find_header(headers, "content-type");
  const ContentType ct = ct_header ? parse_structured(*ct_header) : ContentType{};
  const std::string* cte = find_header(headers, "content-transfer-encoding");

  if (ct.type.starts_with("multipart/") && depth < kMaxMimeDepth) {
    const std::string boundary = ct.param("boundary");
    if (!boundary.empty()) {
      const std::string delim = "--" + boundary;
      std::size_t pos = 0;
      std::vector<std::string_view> parts;
      std::optional<std::size_t> part_start;
      while (pos <= body.size()) {
        const auto eol = body.find('\n', pos);
        const std::string_view line = body.substr(pos, eol == std::string_view::npos ? body.size() - pos : eol - pos);
        if (line.starts_with(delim)) {
          if (part_start) parts.push_back(body.substr(*part_start, pos - *part_start));
          if (line.substr(delim.size()).starts_with("--")) {
            part_start.reset();
            break;
          }
          part_start = eol == std::string_view::npos ? body.size() : eol + 1;
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
      }
      if (part_start) parts.push_back(body.substr(*part_start));
      for (std::string_view part : parts) {
        if (part.ends_with('\n')) part.remove_suffix(1);
        const auto split = split_head_body(part);
        const HeaderList part_headers = split ? parse_headers(split->first) : HeaderList{};
        walk_part(part_headers, split ? split->second : part, depth + 1, out);
      }
      return;
    }
  }

  const std::string* disposition_header = find_header(headers, "content-disposition");
  const ContentType disposition = disposition_header ? parse_structured(*disposition_header) : ContentType{};
  std::string filename = disposition.param("filename");
  if (filename.empty()) filename = ct.param("name");
  filename = text::sanitize_utf8(decode_header_words(filename));
  const bool is_text = ct.type == "text/plain" || ct.type == "text/html";

  if (!filename.empty() && !(is_text && disposition.type == "inline")) {
    out.attachments.push_back(make_attachment(std::move(filename)));
    return;
  }
  if (!is_text || disposition.type == "attachment") return;

  std::string decoded = to_utf8(decode_transfer(body, cte ? *cte : ""), ct.param("charset"));
  out.text_parts.push_back({ct.type == "text/html", std::move(decoded)});
}

std::optional<std::string> extract_address(std::string_view from) {
  std::string value;
  int comment_depth = 0;
  bool quoted = false;
  for (char c : from) {
    if (quoted) {
      if (c == '"') quoted = false;
      value.push_back(c == '@' ? ' ' : c);
      continue;
    }
    if (c == '"' && comment_depth == 0) {
      quoted = true;
      value.push_back(c);
    } else if (c == '(') {
      ++comment_depth;
    } else if (c == ')' && comment_depth > 0) {
      --comment_depth;
    } else if (comment_depth == 0) {
      value.push_back(c);
    }
  }
  std::string_view v = value;
  if (const auto lt = v.rfind('<'); lt != std::string_view::npos) {
    const auto gt = v.find('>', lt);
    v = v.substr(lt + 1, gt == std::string_view::npos ? std::string_view::npos : gt - lt - 1);
  } else {
    for (std::string_view token : text::split(v, ' ')) {
      if (token.find('@') != std::string_view::npos) {
        v = token;
        break;
      }
    }
  }
  v = text::trim(v);
  const auto at = v.rfind('@');
  if (at == std::string_view::npos || at == 0 || at + 1 == v.size()) return std::nullopt;
  if (v.find_first_of(" \t,;<>") != std::string_view::npos) return std::nullopt;
  return text::to_lower(v);
}

}  // namespace

Attachment make_attachment(std::string filename) {
  Attachment a;
  const auto slash = filename.find_last_of("/\\");
  if (slash != std::string::npos) filename.erase(0, slash + 1);
  const auto dot = filename.rfind('.');
  if (dot != std::string::npos) a.extension = text::to_lower(std::string_view(filename).substr(dot + 1));
  a.filename = std::move(filename);
  return a;
}

std::string decode_base64(std::string_view in) {
  static constexpr std::array<signed char, 256> kTable = [] {
    std::array<signed char, 256> t{};
    t.fill(-1);
    constexpr std::string_view alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    for (std::size_t i = 0; i < alphabet.size(); ++i) t[static_cast<unsigned char>(alphabet[i])] = static_cast<signed char>(i);
    t['-'] = 62;
    t['_'] = 63;
    return t;
  }();
  std::string out;
  out.reserve(in.size() * 3 / 4);
  unsigned buffer = 0;
  int bits = 0;
  for (char c : in) {
    if (c == '=') break;
    const int v = kTable[static_cast<unsigned char>(c)];
    if (v < 0) continue;
    buffer = (buffer << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
    }
  }
  return out;
}

std::string decode_quoted_printable(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != '=') {
      out.push_back(in[i]);
      continue;
    }
    if (i + 1 < in.size() && in[i + 1] == '\n') {
      ++i;
    } else if (i + 2 < in.size() && std::isxdigit(static_cast<unsigned char>(in[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(in[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(in.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back('=');
    }
  }
  return out;
}

std::string decode_header_words(std::string_view value) {
  std::string out;
  std::size_t i = 0;
  bool last_was_word = false;
  std::string pending_space;
  while (i < value.size()) {
    if (value.substr(i).starts_with("=?")) {
      const auto q1 = value.find('?', i + 2);
      const auto q2 = q1 == std::string_view::npos ? q1 : value.find('?', q1 + 1);
      const auto end = q2 == std::string_view::npos ? q2 : value.find("?=", q2 + 1);
      if (end != std::string_view::npos && q2 == q1 + 2) {
        const std::string_view charset = value.substr(i + 2, q1 - i - 2);
        const char enc = static_cast<char>(std::toupper(static_cast<unsigned char>(value[q1 + 1])));
        const std::string_view payload = value.substr(q2 + 1, end - q2 - 1);
        std::string bytes;
        if (enc == 'B') {
          bytes = decode_base64(payload);
        } else if (enc == 'Q') {
          std::string qp(payload);
          std::replace(qp.begin(), qp.end(), '_', ' ');
          bytes = decode_quoted_printable(qp);
        }
        if (enc == 'B' || enc == 'Q') {
          if (!last_was_word) out += pending_space;
          pending_space.clear();
          out += to_utf8(bytes, charset.substr(0, charset.find('*')));
          last_was_word = true;
          i = end + 2;
          continue;
        }
      }
    }
    if (value[i] == ' ' || value[i] == '\t') {
      pending_space.push_back(value[i++]);
      continue;
    }
    out += pending_space;
    pending_space.clear();
    out.push_back(value[i++]);
    last_was_word = false;
  }
  out += pending_space;
  return out;
}

std::vector<Link> extract_links(std::string_view body) {
  std::vector<Link> links;
  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];
    if (c == '<' && is_tag_start(body, i)) {
      const std::size_t tag_end = skip_tag(body, i);
      const std::string_view tag = body.substr(i, tag_end - i);
      const bool is_anchor = tag.size() > 2 && (tag[1] == 'a' || tag[1] == 'A') &&
                             (std::isspace(static_cast<unsigned char>(tag[2])) || tag[2] == '>');
      if (!is_anchor) {
        i = tag_end;
        continue;
      }
      const std::string lowered_rest = text::to_lower(body.substr(tag_end));
      const auto close = lowered_rest.find("</a");
      const std::string_view content =
          body.substr(tag_end, close == std::string::npos ? 0 : close);
      i = close == std::string::npos ? tag_end : skip_tag(body, tag_end + close);

      const auto href = tag_attribute(tag, "href");
      if (!href) continue;
      const std::string target = text::decode_html_entities(text::trim(*href));
      auto link = make_link(target);
      if (!link) continue;
      const std::string shown = text::collapse_whitespace(text::decode_html_entities(strip_tags(content)));
      const bool has_image = text::icontains(content, "<img");
      const auto shown_host = displayed_host(shown);
      link->display_text = shown;
      link->wrapped_in_image_or_text = has_image || (!shown.empty() && shown_host != link->host);
      merge_link(links, std::move(*link));
      continue;
    }
    const bool at_word_start = i == 0 || !std::isalnum(static_cast<unsigned char>(body[i - 1]));
    if (at_word_start && (c == 'h' || c == 'H')) {
      const std::string_view rest = body.substr(i);
      if (text::istarts_with(rest, "http://") || text::istarts_with(rest, "https://")) {
        std::size_t end = i;
        while (end < body.size() && !is_url_terminator(body[end])) ++end;
        const std::string_view candidate = trim_url_tail(body.substr(i, end - i));
        if (auto link = make_link(candidate)) merge_link(links, std::move(*link));
        i = end;
        continue;
      }
    }
    ++i;
  }
  return links;
}

ParsedEmail parse_email(const RawEmail& raw) {
  const std::string bytes = normalize_newlines(raw.bytes);
  const auto split = split_head_body(bytes);
  if (!split || split->first.empty()) {
    throw Error(Errc::MalformedEmail, "no header/body separator in " + raw.source_path);
  }
  const HeaderList headers = parse_headers(split->first);

  ParsedEmail email;
  const std::string* from = find_header(headers, "from");
  auto address = from ? extract_address(decode_header_words(*from)) : std::nullopt;
  if (!address) throw Error(Errc::MalformedEmail, "no usable From address in " + raw.source_path);
  email.sender_address = text::sanitize_utf8(*address);
  email.sender_domain = email.sender_address.substr(email.sender_address.rfind('@') + 1);

  if (const std::string* subject = find_header(headers, "subject")) {
    email.subject = text::sanitize_utf8(decode_header_words(*subject));
  }
  if (const std::string* date = find_header(headers, "date")) email.date = parse_rfc5322_date(*date);
  if (const std::string* label = find_header(headers, "x-phish-label")) {
    email.label_hint = text::to_lower(text::trim(*label));
  }

  MimeWalk walk;
  walk_part(headers, split->second, 0, walk);

  for (std::size_t k = 0; k < walk.text_parts.size(); ++k) {
    const TextPart& part = walk.text_parts[k];
    if (k) email.body_text += '\n';
    email.body_text += part.html ? strip_tags(part.content) : part.content;
    for (Link& l : extract_links(part.content)) merge_link(email.links, std::move(l));
  }
  email.body_text = text::sanitize_utf8(email.body_text);
  email.attachments = std::move(walk.attachments);
  return email;
}

}  // namespace phishdet
