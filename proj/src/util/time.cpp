#include "phishdet/util/time.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "phishdet/util/text.hpp"

namespace phishdet {
namespace {

using namespace std::chrono;

// Minimal cursor over the input; every read reports failure instead of throwing.
struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return eof() ? '\0' : s[pos]; }
  bool take(char c) {
    if (peek() != c) return false;
    ++pos;
    return true;
  }
  void skip_space() {
    while (!eof() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool number(int& out, std::size_t min_digits, std::size_t max_digits) {
    std::size_t end = pos;
    while (end < s.size() && end - pos < max_digits && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
    if (end - pos < min_digits) return false;
    std::from_chars(s.data() + pos, s.data() + end, out);
    pos = end;
    return true;
  }
  std::string_view word() {
    const std::size_t start = pos;
    while (!eof() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
    return s.substr(start, pos - start);
  }
};

std::optional<Timestamp> make_time(int y, int mo, int d, int h, int mi, int sec, int offset_minutes) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} - minutes{offset_minutes};
  return time_point_cast<seconds>(tp);
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  Cursor c{text::trim(s)};
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, offset = 0;
  if (!c.number(y, 4, 4) || !c.take('-') || !c.number(mo, 2, 2) || !c.take('-') || !c.number(d, 2, 2)) {
    return std::nullopt;
  }
  if (c.take('T') || c.take(' ')) {
    if (!c.number(h, 2, 2) || !c.take(':') || !c.number(mi, 2, 2)) return std::nullopt;
    if (c.take(':') && !c.number(sec, 2, 2)) return std::nullopt;
    if (c.take('Z')) {
    } else if (c.peek() == '+' || c.peek() == '-') {
      const int sign = c.peek() == '-' ? -1 : 1;
      ++c.pos;
      int oh = 0, om = 0;
      if (!c.number(oh, 2, 2)) return std::nullopt;
      c.take(':');
      if (!c.number(om, 2, 2)) return std::nullopt;
      offset = sign * (oh * 60 + om);
    }
  }
  if (!c.eof()) return std::nullopt;
  return make_time(y, mo, d, h, mi, sec, offset);
}

std::string format_iso_date(Timestamp t) {
  const year_month_day ymd{floor<days>(t)};
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf.data();
}

std::optional<Timestamp> parse_rfc5322_date(std::string_view s) {
  static constexpr std::array<std::string_view, 12> kMonths{"jan", "feb", "mar", "apr", "may", "jun",
                                                            "jul", "aug", "sep", "oct", "nov", "dec"};
  Cursor c{text::trim(s)};
  c.skip_space();
  if (std::isalpha(static_cast<unsigned char>(c.peek()))) {
    c.word();
    if (!c.take(',')) return std::nullopt;
  }
  c.skip_space();
  int d = 0, y = 0, h = 0, mi = 0, sec = 0;
  if (!c.number(d, 1, 2)) return std::nullopt;
  c.skip_space();
  const std::string mon = text::to_lower(c.word());
  int mo = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (mon.size() >= 3 && mon.substr(0, 3) == kMonths[i]) mo = static_cast<int>(i) + 1;
  }
  if (mo == 0) return std::nullopt;
  c.skip_space();
  const std::size_t year_start = c.pos;
  if (!c.number(y, 2, 4)) return std::nullopt;
  if (c.pos - year_start == 2) y += y < 50 ? 2000 : 1900;
  c.skip_space();
  if (!c.number(h, 1, 2) || !c.take(':') || !c.number(mi, 2, 2)) return std::nullopt;
  if (c.take(':') && !c.number(sec, 2, 2)) return std::nullopt;
  c.skip_space();
  int offset = 0;
  if (c.peek() == '+' || c.peek() == '-') {
    const int sign = c.peek() == '-' ? -1 : 1;
    ++c.pos;
    int hhmm = 0;
    if (!c.number(hhmm, 4, 4)) return std::nullopt;
    offset = sign * ((hhmm / 100) * 60 + hhmm % 100);
  } else {
    const std::string zone = text::to_lower(c.word());
    if (zone == "est") offset = -300;
    else if (zone == "edt") offset = -240;
    else if (zone == "cst") offset = -360;
    else if (zone == "cdt") offset = -300;
    else if (zone == "mst") offset = -420;
    else if (zone == "mdt") offset = -360;
    else if (zone == "pst") offset = -480;
    else if (zone == "pdt") offset = -420;
  }
  return make_time(y, mo, d, h, mi, sec, offset);
}

}  // namespace phishdet
