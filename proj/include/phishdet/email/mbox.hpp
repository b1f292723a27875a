#pragma once

#include <string_view>
#include <vector>

#include "phishdet/email/email.hpp"

namespace phishdet {

// Splits an mbox ("From " separator lines) into messages. The blank line that
// conventionally precedes each separator is not part of the message, and
// ">From " quoting is undone. An empty or whitespace-only input yields no
// messages; any other input without a separator is Error{MalformedMbox}.
std::vector<RawEmail> parse_mbox(std::string_view bytes, std::string_view source_path = "");

}  // namespace phishdet
