#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace phishdet::text {

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool istarts_with(std::string_view s, std::string_view prefix) noexcept;
bool icontains(std::string_view haystack, std::string_view needle) noexcept;
std::string_view trim(std::string_view s) noexcept;

// Collapse every whitespace run to one space and trim.
std::string collapse_whitespace(std::string_view s);

// Lowercase, then collapse every whitespace run to one space and trim.
std::string fold_and_collapse(std::string_view s);

// Replace ill-formed UTF-8 with U+FFFD. Well-formed input comes back unchanged.
std::string sanitize_utf8(std::string_view s);

// Latin-1 bytes to UTF-8.
std::string latin1_to_utf8(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

// Decodes the handful of entities that show up in mail HTML (&amp; &lt; &gt;
// &quot; &apos; &nbsp; and numeric references).
std::string decode_html_entities(std::string_view s);

}  // namespace phishdet::text
