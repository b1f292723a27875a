#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "phishdet/email/email.hpp"
#include "phishdet/email/mbox.hpp"
#include "phishdet/error.hpp"
#include "phishdet/features/features.hpp"
#include "phishdet/resolvers/fixture_resolver.hpp"

using namespace phishdet;
using namespace std::chrono;

namespace {

ParsedEmail mail(const std::string& from, const std::string& body, const std::string& subject = "hello") {
  return parse_email(RawEmail{"", "From: " + from + "\nSubject: " + subject + "\nContent-Type: text/html\n\n" + body});
}

ParsedEmail with_links(std::initializer_list<const char*> urls) {
  std::string body;
  for (const char* u : urls) body += std::string(u) + "\n";
  return parse_email(RawEmail{"", "From: a@und.edu\nSubject: s\n\n" + body});
}

FixtureResolver toy_resolver() {
  ResolverFixture f;
  f.reference_now = sys_days{year{2021} / 6 / 1};
  f.redirects["http://s/1"] = "http://evil/2";
  f.redirects["http://down/"] = std::nullopt;
  f.certificates["a"] = CertificateInfo{true, "Thawte", false};
  f.certificates["good.com"] = CertificateInfo{true, "Comodo CA Limited", false};
  f.certificates["self.com"] = CertificateInfo{true, "self.com", true};
  f.ranks["popular.com"] = TrafficRank{512};
  f.ranks["rare.com"] = TrafficRank{3000000};
  f.ranks["edge.com"] = TrafficRank{150000};
  f.ages["old.com"] = f.reference_now - days{400};
  f.ages["new.com"] = f.reference_now - days{10};
  return FixtureResolver(f);
}

const FeatureConfig cfg = FeatureConfig::defaults();

std::vector<std::vector<int>> expected_rows() {
  std::istringstream in(test::slurp(test::fixture("expected_vectors.csv")));
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<int>> rows;
  while (std::getline(in, line)) {
    std::vector<int> row;
    for (char c : line)
      if (c == '0' || c == '1') row.push_back(c - '0');
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("default config constants") {
  for (const char* k : {"click now", "verify now", "valid in 24h", "update now"})
    CHECK(std::count(cfg.blacklist_keywords.begin(), cfg.blacklist_keywords.end(), k) == 1);
  for (const char* k : {"godaddy", "comodo", "symantec"})
    CHECK(std::count(cfg.trusted_cas.begin(), cfg.trusted_cas.end(), k) == 1);
  for (const char* k : {"goo.gl", "j.mp"}) CHECK(std::count(cfg.shortener_hosts.begin(), cfg.shortener_hosts.end(), k) == 1);
  for (const char* k : {"exe", "dll"})
    CHECK(std::count(cfg.suspicious_extensions.begin(), cfg.suspicious_extensions.end(), k) == 1);
  CHECK(cfg.rank_threshold == 150000);
  CHECK(cfg.min_age_days == 365);
  CHECK(cfg.rank_threshold_inclusive);
  CHECK_FALSE(cfg.credible_domains.empty());
  CHECK(load_feature_config(test::data_file("feature_config.json")) == cfg);
  CHECK(parse_feature_config(to_json(cfg)) == cfg);
}

TEST_CASE("feature config validation") {
  std::string json = to_json(cfg);
  CHECK_THROWS_AS(parse_feature_config(json.substr(0, json.size() / 2)), Error);
  CHECK_THROWS_AS(parse_feature_config(R"({"blacklist_keywords":[]})"), Error);
  const auto bad_key = json.substr(0, json.rfind('}')) + R"(, "colour": "red"})";
  try {
    parse_feature_config(bad_key);
    FAIL("accepted unknown key");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidConfig);
  }
  FeatureConfig c = cfg;
  c.rank_threshold = 0;
  CHECK_THROWS_AS(parse_feature_config(to_json(c)), Error);
  c = cfg;
  c.rank_threshold_inclusive = false;
  CHECK(parse_feature_config(to_json(c)) == c);
}

TEST_CASE("f1 plain http") {
  const auto r = toy_resolver();
  CHECK(f1_ssl(with_links({"https://a"}), cfg, r) == 0);
  CHECK(f1_ssl(with_links({"http://a"}), cfg, r) == 1);
  CHECK(f1_ssl(with_links({"https://a", "http://b"}), cfg, r) == 1);
  CHECK(f1_ssl(with_links({}), cfg, r) == 0);
}

TEST_CASE("f2 certificate authority") {
  const auto r = toy_resolver();
  CHECK(f2_ca(with_links({"https://good.com/x"}), cfg, r) == 0);
  CHECK(f2_ca(with_links({"https://self.com/x"}), cfg, r) == 1);
  CHECK(f2_ca(with_links({"https://a/"}), cfg, r) == 1);
  CHECK(f2_ca(with_links({"https://nocert.com/"}), cfg, r) == 1);
  CHECK(f2_ca(with_links({"http://self.com/"}), cfg, r) == 0);
  CHECK(f2_ca(with_links({}), cfg, r) == 0);
}

TEST_CASE("f3 blacklist") {
  const auto r = toy_resolver();
  CHECK(f3_blacklist(mail("a@b.com", "please Verify Now"), cfg, r) == 1);
  CHECK(f3_blacklist(mail("a@b.com", "meeting at noon"), cfg, r) == 0);
  CHECK(f3_blacklist(mail("a@b.com", "nothing", "CLICK NOW for prizes"), cfg, r) == 1);
  CHECK(f3_blacklist(mail("a@b.com", "please update\n   now"), cfg, r) == 1);
}

TEST_CASE("f4 redirects") {
  const auto r = toy_resolver();
  CHECK(f4_redirect(with_links({"http://a/x"}), cfg, r) == 0);
  CHECK(f4_redirect(with_links({"http://s/1"}), cfg, r) == 1);
  CHECK(f4_redirect(with_links({"http://down/"}), cfg, r) == 1);
  CHECK(f4_redirect(with_links({}), cfg, r) == 0);
}

TEST_CASE("f5 hidden links") {
  const auto r = toy_resolver();
  CHECK(f5_hidden(with_links({"https://goo.gl/abc"}), cfg, r) == 1);
  CHECK(f5_hidden(with_links({"https://example.com/page"}), cfg, r) == 0);
  CHECK(f5_hidden(mail("a@b.com", "<a href=\"https://x.y/p\"><img src=\"i.png\"></a>"), cfg, r) == 1);
  CHECK(f5_hidden(mail("a@b.com", "<a href=\"https://x.y/p\">click here</a>"), cfg, r) == 1);
  CHECK(f5_hidden(mail("a@b.com", "<a href=\"https://x.y/p\">https://x.y/p</a>"), cfg, r) == 0);
}

TEST_CASE("f6 ip literal") {
  const auto r = toy_resolver();
  CHECK(f6_clear_ip(with_links({"https://50.10.125.26/index.php"}), cfg, r) == 1);
  CHECK(f6_clear_ip(with_links({"https://example.com"}), cfg, r) == 0);
  CHECK(f6_clear_ip(with_links({}), cfg, r) == 0);
}

TEST_CASE("f7 traffic rank") {
  const auto r = toy_resolver();
  CHECK(f7_traffic(with_links({"https://popular.com/"}), cfg, r) == 0);
  CHECK(f7_traffic(with_links({"https://rare.com/"}), cfg, r) == 1);
  CHECK(f7_traffic(with_links({"https://edge.com/"}), cfg, r) == 0);
  CHECK(f7_traffic(with_links({"https://unknown.org/"}), cfg, r) == 1);
  CHECK(f7_traffic(with_links({"https://rare.com/", "https://popular.com/"}), cfg, r) == 0);
  CHECK(f7_traffic(with_links({}), cfg, r) == 0);
  FeatureConfig strict = cfg;
  strict.rank_threshold_inclusive = false;
  CHECK(f7_traffic(with_links({"https://edge.com/"}), strict, r) == 1);
  CHECK(f7_traffic(with_links({"https://popular.com/"}), strict, r) == 0);
}

TEST_CASE("f8 domain age") {
  const auto r = toy_resolver();
  CHECK(f8_age(with_links({"https://old.com/"}), cfg, r) == 0);
  CHECK(f8_age(with_links({"https://new.com/"}), cfg, r) == 1);
  CHECK(f8_age(with_links({"https://unknown.org/"}), cfg, r) == 1);
  CHECK(f8_age(with_links({"https://www.old.com/"}), cfg, r) == 0);
  CHECK(f8_age(with_links({}), cfg, r) == 0);
}

TEST_CASE("f9 sender domain") {
  const auto r = toy_resolver();
  CHECK(f9_sender(mail("a@dropbox.com", "x"), cfg, r) == 0);
  CHECK(f9_sender(mail("a@sharing.dboxfile.com", "x"), cfg, r) == 1);
  CHECK(f9_sender(mail("a@und.edu", "x"), cfg, r) == 0);
  CHECK(f9_sender(mail("a@UND.EDU", "x"), cfg, r) == 0);
  CHECK(f9_sender(mail("a@mail.und.edu", "x"), cfg, r) == 1);
}

TEST_CASE("f10 attachments") {
  const auto r = toy_resolver();
  ParsedEmail e = mail("a@b.com", "x");
  CHECK(f10_attachment(e, cfg, r) == 0);
  e.attachments = {make_attachment("report.pdf")};
  CHECK(f10_attachment(e, cfg, r) == 0);
  e.attachments.push_back(make_attachment("invoice.EXE"));
  CHECK(f10_attachment(e, cfg, r) == 1);
}

TEST_CASE("extract_vector") {
  const auto r = toy_resolver();
  const FeatureVector clean = extract_vector(mail("a@und.edu", "meeting at noon"), cfg, r);
  CHECK(clean.values == std::array<std::uint8_t, 10>{});
  CHECK_FALSE(clean.label);

  ParsedEmail phish = mail("x@evil.biz", "Verify Now at http://50.10.125.26/login");
  phish.attachments = {make_attachment("invoice.exe")};
  const FeatureVector v = extract_vector(phish, cfg, r);
  CHECK(v[0] == 1);
  CHECK(v[2] == 1);
  CHECK(v[5] == 1);
  CHECK(v[9] == 1);
  CHECK(v.values.size() == kFeatureCount);
}

TEST_CASE("extract_vector matches the individual rules on random emails") {
  const auto r = toy_resolver();
  const char* urls[] = {"http://s/1", "https://good.com/x", "https://self.com/", "http://down/", "https://goo.gl/q",
                        "https://50.10.125.26/i", "https://popular.com/", "https://old.com/", "https://new.com/"};
  const char* words[] = {"hello", "Click Now", "report", "valid in 24h", "team"};
  const char* senders[] = {"a@und.edu", "b@evil.biz", "c@dropbox.com"};
  const char* files[] = {"a.pdf", "b.exe", "c.dll", "d"};
  using Rule = int (*)(const ParsedEmail&, const FeatureConfig&, const Resolver&);
  const Rule rules[] = {f1_ssl, f2_ca, f3_blacklist, f4_redirect, f5_hidden, f6_clear_ip, f7_traffic, f8_age, f9_sender, f10_attachment};
  phishdet::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::string body;
    for (int k = 0, n = static_cast<int>(rng.below(4)); k < n; ++k) body += std::string(urls[rng.below(9)]) + " ";
    for (int k = 0, n = static_cast<int>(rng.below(3)); k < n; ++k) body += std::string(words[rng.below(5)]) + " ";
    ParsedEmail e = parse_email(RawEmail{"", std::string("From: ") + senders[rng.below(3)] + "\n\n" + body});
    for (int k = 0, n = static_cast<int>(rng.below(3)); k < n; ++k) e.attachments.push_back(make_attachment(files[rng.below(4)]));
    const FeatureVector v = extract_vector(e, cfg, r);
    for (std::size_t i = 0; i < kFeatureCount; ++i) CHECK(v[i] == rules[i](e, cfg, r));
    CHECK(v == extract_vector(e, cfg, r));

    ParsedEmail mutated = e;
    mutated.body_text += " click now";
    CHECK(f9_sender(mutated, cfg, r) == v[8]);
    CHECK(f10_attachment(mutated, cfg, r) == v[9]);
    CHECK(f3_blacklist(mutated, cfg, r) == 1);
    mutated.attachments.push_back(make_attachment("x.exe"));
    CHECK(f10_attachment(mutated, cfg, r) == 1);

    ParsedEmail linkless = e;
    linkless.links.clear();
    const FeatureVector lv = extract_vector(linkless, cfg, r);
    for (std::size_t i : {0u, 1u, 3u, 4u, 5u, 6u, 7u}) CHECK(lv[i] == 0);
  }
}

TEST_CASE("fixture mailbox yields the hand-labeled vectors") {
  const FixtureResolver r(load_resolver_fixture(test::fixture("resolvers.json")));
  const auto msgs = parse_mbox(test::slurp(test::fixture("mailbox.mbox")));
  const auto expected = expected_rows();
  REQUIRE(msgs.size() == 20);
  REQUIRE(expected.size() == 20);
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const ParsedEmail e = parse_email(msgs[i]);
    CAPTURE(i + 1);
    CAPTURE(e.subject);
    const FeatureVector v = extract_vector(e, cfg, r);
    REQUIRE(expected[i].size() == 11);
    for (std::size_t j = 0; j < kFeatureCount; ++j) CHECK(v[j] == expected[i][j]);
    REQUIRE(e.label_hint);
    CHECK((*e.label_hint == "phishing") == (expected[i][10] == 1));
  }
  CHECK(extract_vector(parse_email(msgs[2]), cfg, r)[5] == 1);  // IP-literal URL
  CHECK(extract_vector(parse_email(msgs[3]), cfg, r)[4] == 1);  // goo.gl
  CHECK(extract_vector(parse_email(msgs[3]), cfg, r)[2] == 1);  // Verify Now
  CHECK(extract_vector(parse_email(msgs[4]), cfg, r)[9] == 1);  // .exe
}
