#include "phishdet/email/mbox.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "phishdet/error.hpp"

namespace phishdet {
namespace {

bool is_separator(std::string_view line) { return line.starts_with("From "); }

// ">From ", ">>From ", ... lose one '>' (mboxrd quoting).
bool is_quoted_from(std::string_view line) {
  const auto first = line.find_first_not_of('>');
  return first != 0 && first != std::string_view::npos && line.substr(first).starts_with("From ");
}

}  // namespace

std::vector<RawEmail> parse_mbox(std::string_view bytes, std::string_view source_path) {
  std::vector<RawEmail> messages;
  if (std::all_of(bytes.begin(), bytes.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
    return messages;
  }

  std::string current;
  bool in_message = false;
  auto flush = [&] {
    if (!in_message) return;
    // drop the blank line that separates messages
    if (current.ends_with("\r\n\r\n")) {
      current.resize(current.size() - 2);
    } else if (current.ends_with("\n\n")) {
      current.pop_back();
    }
    messages.push_back({std::string(source_path) + "#" + std::to_string(messages.size()), std::move(current)});
    current.clear();
  };

  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto eol = bytes.find('\n', pos);
    const std::size_t next = eol == std::string_view::npos ? bytes.size() : eol + 1;
    const std::string_view line = bytes.substr(pos, next - pos);
    if (is_separator(line)) {
      flush();
      in_message = true;
    } else if (in_message) {
      current.append(is_quoted_from(line) ? line.substr(1) : line);
    } else if (line.find_first_not_of(" \t\r\n") != std::string_view::npos) {
      throw Error(Errc::MalformedMbox, "content before the first \"From \" separator in " + std::string(source_path));
    }
    pos = next;
  }
  flush();
  return messages;
}

}  // namespace phishdet
