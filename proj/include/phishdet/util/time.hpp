#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace phishdet {

using Timestamp = std::chrono::sys_seconds;

// "YYYY-MM-DD", optionally followed by "THH:MM[:SS]" and "Z" or "+HH:MM".
std::optional<Timestamp> parse_iso8601(std::string_view s);

// "YYYY-MM-DD" in UTC.
std::string format_iso_date(Timestamp t);

// RFC 5322 date-time, e.g. "Mon, 22 May 2017 10:15:00 -0500". The weekday is
// optional and not cross-checked. Obsolete zone names (GMT, UT, EST, ...) are
// accepted.
std::optional<Timestamp> parse_rfc5322_date(std::string_view s);

}  // namespace phishdet
