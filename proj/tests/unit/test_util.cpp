#include <chrono>

#include "doctest.h"
#include "phishdet/email/url.hpp"
#include "phishdet/error.hpp"
#include "phishdet/util/text.hpp"
#include "phishdet/util/time.hpp"

using namespace phishdet;
using namespace std::chrono;

TEST_CASE("text helpers") {
  CHECK(text::to_lower("AbC") == "abc");
  CHECK(text::iequals("Goo.GL", "goo.gl"));
  CHECK_FALSE(text::iequals("goo.gl", "goo.g"));
  CHECK(text::icontains("Please VERIFY now", "verify NOW"));
  CHECK(text::trim("  x y \t\n") == "x y");
  CHECK(text::fold_and_collapse("  Click\n\tNOW  please ") == "click now please");
  CHECK(text::sanitize_utf8("ok \xC3\xA9") == "ok \xC3\xA9");
  CHECK(text::sanitize_utf8("bad \xFF") == "bad \xEF\xBF\xBD");
  CHECK(text::latin1_to_utf8("caf\xE9") == "caf\xC3\xA9");
  CHECK(text::decode_html_entities("a &amp; b &lt;c&gt; &#65;&#x42;") == "a & b <c> AB");
  const auto parts = text::split("a,,b", ',');
  REQUIRE(parts.size() == 3);
  CHECK(parts[1].empty());
}

TEST_CASE("iso-8601 dates") {
  const auto d = parse_iso8601("2021-06-01");
  REQUIRE(d);
  CHECK(*d == sys_days{year{2021} / 6 / 1});
  CHECK(format_iso_date(*d) == "2021-06-01");
  const auto t = parse_iso8601("2021-06-01T10:30:00+02:00");
  REQUIRE(t);
  CHECK(*t == sys_days{year{2021} / 6 / 1} + hours{8} + minutes{30});
  CHECK_FALSE(parse_iso8601("2021-13-01"));
  CHECK_FALSE(parse_iso8601("2021-02-30"));
  CHECK_FALSE(parse_iso8601("yesterday"));
}

TEST_CASE("rfc 5322 dates") {
  const auto d = parse_rfc5322_date("Mon, 12 Apr 2021 09:15:00 -0500");
  REQUIRE(d);
  CHECK(*d == sys_days{year{2021} / 4 / 12} + hours{14} + minutes{15});
  const auto g = parse_rfc5322_date("1 Jan 2000 00:00 GMT");
  REQUIRE(g);
  CHECK(*g == sys_days{year{2000} / 1 / 1});
  CHECK_FALSE(parse_rfc5322_date("not a date"));
}

TEST_CASE("url parsing and canonical form") {
  const auto u = parse_url("HTTPS://User@Example.COM:8443/a/B?q=1#f");
  REQUIRE(u);
  CHECK(u->scheme == "https");
  CHECK(u->scheme_kind() == Scheme::https);
  CHECK(u->userinfo == "User");
  CHECK(u->host == "example.com");
  CHECK(u->port == 8443);
  CHECK(u->tail == "/a/B?q=1#f");
  CHECK(canonicalize_url("HTTP://A.com:80") == "http://a.com/");
  CHECK(canonicalize_url("http://a.com/x") == canonicalize_url("http://A.COM/x"));
  CHECK(canonicalize_url("http://a.com/x") != canonicalize_url("http://a.com/X"));
  CHECK_FALSE(parse_url("mailto:someone@x.com"));
  CHECK_FALSE(parse_url("no url"));
}

TEST_CASE("url components round-trip") {
  for (const char* s : {"https://50.10.125.26/index.php", "http://a.com", "https://goo.gl/abc", "http://[::1]:8080/p?x=y",
                        "https://u:p@host.example/a%20b"}) {
    CAPTURE(s);
    const auto u = parse_url(s);
    REQUIRE(u);
    const auto again = parse_url(to_string(*u));
    REQUIRE(again);
    CHECK(*again == *u);
  }
}

TEST_CASE("ip literal hosts") {
  CHECK(is_ip_literal("50.10.125.26"));
  CHECK(is_ip_literal("[::1]"));
  CHECK(is_ip_literal("[2001:db8::1]"));
  CHECK_FALSE(is_ip_literal("256.1.1.1"));
  CHECK_FALSE(is_ip_literal("1.2.3"));
  CHECK_FALSE(is_ip_literal("goo.gl"));
  CHECK_FALSE(is_ip_literal("1.2.3.4.example.com"));
}

TEST_CASE("error codes name themselves") {
  const Error e(Errc::TooManyHops, "x");
  CHECK(e.code() == Errc::TooManyHops);
  CHECK(std::string(e.what()) == "TooManyHops: x");
}
