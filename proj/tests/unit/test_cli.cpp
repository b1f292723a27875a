#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "phishdet/cli/app.hpp"
#include "phishdet/corpus/corpus.hpp"
#include "phishdet/ml/model_io.hpp"

using namespace phishdet;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "phishdet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string fx(const std::string& name) { return test::fixture(name).string(); }

}  // namespace

TEST_CASE("extract reproduces the hand-labeled vectors") {
  test::TempDir dir("cli_extract");
  const std::string csv = (dir / "v.csv").string();
  const auto r = run({"extract", "--input", fx("mailbox.mbox"), "--fixtures", fx("resolvers.json"), "--output", csv,
                      "--manifest", (dir / "m.json").string()});
  CHECK(r.code == 0);
  CHECK(test::slurp(csv) == test::slurp(test::fixture("expected_vectors.csv")));
  const std::string manifest = test::slurp(dir / "m.json");
  CHECK(manifest.find("\"phishing\": 12") != std::string::npos);
  CHECK(manifest.find("\"legitimate\": 8") != std::string::npos);

  const auto again = run({"extract", "--input", fx("mailbox.mbox"), "--fixtures", fx("resolvers.json"), "--output",
                          (dir / "v2.csv").string(), "--feature-config", test::data_file("feature_config.json").string()});
  CHECK(again.code == 0);
  CHECK(test::slurp(dir / "v2.csv") == test::slurp(csv));
}

TEST_CASE("extract edge cases") {
  test::TempDir dir("cli_extract_edge");
  {
    std::ofstream(dir / "empty.mbox").flush();
  }
  const auto empty = run({"extract", "--input", (dir / "empty.mbox").string(), "--output", (dir / "e.csv").string()});
  CHECK(empty.code == 0);
  CHECK(test::slurp(dir / "e.csv") == "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,label\n");

  const auto missing = run({"extract", "--input", fx("mailbox.mbox"), "--fixtures", "/no/such/fixture.json", "--output",
                            (dir / "x.csv").string()});
  CHECK(missing.code != 0);
  CHECK(missing.err.find("/no/such/fixture.json") != std::string::npos);

  {
    std::ofstream f(dir / "plain.eml");
    f << "From: a@b.com\nSubject: hi\n\nhello\n";
  }
  const auto unlabeled = run({"extract", "--input", (dir / "plain.eml").string(), "--output", (dir / "u.csv").string()});
  CHECK(unlabeled.code == cli::kExitData);
  const auto labeled = run({"extract", "--input", (dir / "plain.eml").string(), "--label", "legitimate", "--output",
                            (dir / "u.csv").string()});
  CHECK(labeled.code == 0);
  CHECK(test::slurp(dir / "u.csv") == "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,label\n0,0,0,0,0,0,0,0,1,0,0\n");

  const auto dup = run({"extract", "--input", (dir / "plain.eml").string(), "--input", (dir / "plain.eml").string(),
                        "--label", "phishing", "--dedup", "--output", (dir / "d.csv").string()});
  CHECK(dup.code == 0);
  CHECK(lines(test::slurp(dir / "d.csv")) == 2);
}

TEST_CASE("gen-corpus") {
  test::TempDir dir("cli_gen");
  const auto a = run({"gen-corpus", "--input", test::data_file("synthetic_default.json").string(), "--output",
                      (dir / "a.csv").string()});
  CHECK(a.code == 0);
  const std::string text = test::slurp(dir / "a.csv");
  CHECK(lines(text) == 4001);
  CHECK(read_dataset_csv(text, true).count(1) == 2000);
  CHECK(run({"gen-corpus", "--output", (dir / "b.csv").string()}).code == 0);
  CHECK(test::slurp(dir / "b.csv") == text);
  CHECK(run({"gen-corpus", "--seed", "7", "--output", (dir / "c.csv").string()}).code == 0);
  CHECK(test::slurp(dir / "c.csv") != text);
  CHECK(run({"gen-corpus", "--seed", "7", "--output", (dir / "d.csv").string()}).code == 0);
  CHECK(test::slurp(dir / "d.csv") == test::slurp(dir / "c.csv"));

  {
    std::ofstream f(dir / "bad.json");
    f << R"({"n_per_class": 10, "p_legitimate": [2], "p_phishing": [], "seed": 1})";
  }
  const auto bad = run({"gen-corpus", "--input", (dir / "bad.json").string(), "--output", (dir / "e.csv").string()});
  CHECK(bad.code == cli::kExitData);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("train, evaluate and classify") {
  test::TempDir dir("cli_train");
  const std::string data = (dir / "data.csv").string();
  REQUIRE(run({"gen-corpus", "--output", data}).code == 0);

  const std::string m1 = (dir / "m1.json").string(), m2 = (dir / "m2.json").string();
  const auto t1 = run({"train", "--input", data, "--model", "lr", "--seed", "42", "--output", m1, "--test-output",
                       (dir / "test.csv").string()});
  CHECK(t1.code == 0);
  CHECK(run({"train", "--input", data, "--model", "lr", "--seed", "42", "--output", m2}).code == 0);
  CHECK(test::slurp(m1) == test::slurp(m2));
  CHECK(model_kind(load_model(m1).model) == "lr");
  CHECK(lines(test::slurp(dir / "test.csv")) == 1201);

  const auto ev = run({"evaluate", "--model-file", m1, "--input", (dir / "test.csv").string(), "--output",
                       (dir / "metrics.csv").string()});
  CHECK(ev.code == 0);
  for (const char* col : {"p_d", "p_fa", "p_md", "accuracy"}) CHECK(ev.out.find(col) != std::string::npos);
  CHECK(test::slurp(dir / "metrics.csv").rfind("param,p_d,p_fa,p_md,accuracy\nlr,", 0) == 0);

  const auto phish = run({"classify", "--model-file", m1, "--input", fx("emails/03_phish_ip_literal.eml"), "--fixtures",
                          fx("resolvers.json")});
  CHECK(phish.code == 0);
  CHECK(phish.out.rfind("phishing score=", 0) == 0);
  CHECK(phish.out.find("f6_ip_literal") != std::string::npos);
  const auto clean = run({"classify", "--model-file", m1, "--input", fx("emails/02_legit_no_links.eml"), "--fixtures",
                          fx("resolvers.json")});
  CHECK(clean.code == 0);
  CHECK(clean.out.rfind("legitimate score=", 0) == 0);
  CHECK(clean.out.find("fired=none") != std::string::npos);
  {
    std::ofstream f(dir / "broken.eml");
    f << "Subject: no sender and no body separator";
  }
  CHECK(run({"classify", "--model-file", m1, "--input", (dir / "broken.eml").string()}).code == cli::kExitData);

  for (const char* kind : {"ann", "svm"}) {
    CAPTURE(kind);
    const std::string a = (dir / (std::string(kind) + "_a.json")).string();
    const std::string b = (dir / (std::string(kind) + "_b.json")).string();
    std::vector<std::string> args{"train", "--input", data, "--model", kind, "--seed", "3", "--layers", "8",
                                  "--epochs", "50", "--kernel", "rbf"};
    auto with = [&](const std::string& out) {
      auto v = args;
      v.insert(v.end(), {"--output", out});
      return v;
    };
    CHECK(run(with(a)).code == 0);
    CHECK(run(with(b)).code == 0);
    CHECK(test::slurp(a) == test::slurp(b));
  }
}

TEST_CASE("evaluate honours the false-alarm denominator") {
  test::TempDir dir("cli_eval");
  // Predicts f1: rows 1 1 1 0 0 0 against labels 1 1 0 0 0 0.
  LogisticModel lr;
  lr.weights.assign(11, 0.0);
  lr.weights[0] = -5.0;
  lr.weights[1] = 10.0;
  save_model(ModelBundle{lr, std::nullopt}, dir / "m.json");
  {
    std::ofstream f(dir / "d.csv");
    f << "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,label\n";
    for (const char* row : {"1,0,0,0,0,0,0,0,0,0,1", "1,0,0,0,0,0,0,0,0,0,1", "1,0,0,0,0,0,0,0,0,0,0",
                            "0,0,0,0,0,0,0,0,0,0,0", "0,0,0,0,0,0,0,0,0,0,0", "0,0,0,0,0,0,0,0,0,0,0"})
      f << row << "\n";
  }
  const std::string m = (dir / "m.json").string(), d = (dir / "d.csv").string();
  const auto standard = run({"evaluate", "--model-file", m, "--input", d});
  const auto paper = run({"evaluate", "--model-file", m, "--input", d, "--pfa-denominator", "paper"});
  CHECK(standard.out == "p_d       1.0000\np_fa      0.2500\np_md      0.0000\naccuracy  0.8333\n");
  CHECK(paper.out == "p_d       1.0000\np_fa      0.5000\np_md      0.0000\naccuracy  0.8333\n");

  // Perfect separation.
  {
    std::ofstream f(dir / "p.csv");
    f << "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,label\n1,0,0,0,0,0,0,0,0,0,1\n0,1,0,0,0,0,0,0,0,0,0\n";
  }
  const auto perfect = run({"evaluate", "--model-file", m, "--input", (dir / "p.csv").string()});
  CHECK(perfect.out.find("accuracy  1.0000") != std::string::npos);
  CHECK(run({"evaluate", "--model-file", m, "--input", d, "--pfa-denominator", "odd"}).code == cli::kExitUsage);
}

TEST_CASE("sweep") {
  test::TempDir dir("cli_sweep");
  const std::string data = (dir / "data.csv").string();
  REQUIRE(run({"gen-corpus", "--n-per-class", "300", "--output", data}).code == 0);
  const auto a = run({"sweep", "--input", data, "--model", "lr", "--grid", "0:1:0.1", "--seed", "5", "--epochs", "200"});
  CHECK(a.code == 0);
  CHECK(lines(a.out) == 12);
  CHECK(a.out.rfind("param,p_d,p_fa,p_md,accuracy\n0,", 0) == 0);
  const auto b = run({"sweep", "--input", data, "--model", "lr", "--grid", "0:1:0.1", "--seed", "5", "--epochs", "200",
                      "--output", (dir / "s.csv").string()});
  CHECK(b.code == 0);
  CHECK(test::slurp(dir / "s.csv") == a.out);
  CHECK(run({"sweep", "--input", data, "--grid", "1:0:0.1"}).code == cli::kExitUsage);
}

TEST_CASE("grid tables") {
  test::TempDir dir("cli_grid");
  const std::string data = (dir / "data.csv").string();
  REQUIRE(run({"gen-corpus", "--n-per-class", "100", "--output", data}).code == 0);
  const auto r = run({"grid", "--input", data, "--epochs", "20", "--output", (dir / "g.csv").string(), "--report",
                      (dir / "g.txt").string()});
  CHECK(r.code == 0);
  const std::string csv = test::slurp(dir / "g.csv");
  CHECK(lines(csv) == 1 + 6 + 4 + 3);
  CHECK(test::slurp(dir / "g.txt") == r.out);
  CHECK(r.out.find("ANN architectures") != std::string::npos);
  const auto again = run({"grid", "--input", data, "--epochs", "20", "--output", (dir / "g2.csv").string()});
  CHECK(test::slurp(dir / "g2.csv") == csv);
  const auto kernels = run({"grid", "--input", data, "--table", "kernels"});
  CHECK(kernels.code == 0);
  CHECK(kernels.out.find("cubic") != std::string::npos);
}

TEST_CASE("exit codes") {
  test::TempDir dir("cli_exit");
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"train", "--input", "x.csv"}).code == cli::kExitUsage);
  CHECK(run({"train", "--input", "x.csv", "--output", "m.json", "--bogus"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);

  const std::string data = (dir / "data.csv").string();
  REQUIRE(run({"gen-corpus", "--n-per-class", "50", "--output", data}).code == 0);
  const std::string model = (dir / "m.json").string();
  CHECK(run({"train", "--input", data, "--output", model, "--lr", "1e300"}).code == cli::kExitDiverged);
  CHECK(run({"train", "--input", data, "--output", model, "--model", "ann", "--layers", "4", "--lr", "1e300"}).code ==
        cli::kExitDiverged);
  CHECK(run({"train", "--input", data, "--output", model, "--epochs", "0"}).code == cli::kExitUsage);
  CHECK(run({"train", "--input", data, "--output", model, "--model", "ann", "--layers", "4,x"}).code == cli::kExitUsage);
  CHECK(run({"train", "--input", data, "--output", model, "--model", "svm", "--kernel", "cubic"}).code == cli::kExitUsage);
  CHECK(run({"train", "--input", (dir / "missing.csv").string(), "--output", model}).code == cli::kExitData);

  {
    std::ofstream f(dir / "one.csv");
    f << "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,label\n1,0,0,0,0,0,0,0,0,0,1\n0,1,0,0,0,0,0,0,0,0,1\n";
  }
  const auto single = run({"train", "--input", (dir / "one.csv").string(), "--output", model, "--train-fraction", "1"});
  CHECK(single.code == cli::kExitData);
  CHECK(single.err.find("SingleClassData") != std::string::npos);
}
