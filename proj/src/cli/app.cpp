#include "phishdet/cli/app.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phishdet/corpus/corpus.hpp"
#include "phishdet/email/mbox.hpp"
#include "phishdet/error.hpp"
#include "phishdet/eval/experiments.hpp"
#include "phishdet/features/features.hpp"
#include "phishdet/resolvers/fixture_resolver.hpp"
#include "phishdet/util/text.hpp"
#if defined(PHISHDET_WITH_LIVE)
#include "phishdet/resolvers/live_resolver.hpp"
#endif

namespace phishdet::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

// Options shared by the commands that look at emails.
struct ResolverFlags {
  std::string feature_config;
  std::string fixtures;
  bool live = false;
  std::string reference_now;
  std::string rank_endpoint;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--feature-config", feature_config, "Feature configuration JSON (default: built-in)");
    cmd.add_option("--fixtures", fixtures, "Resolver fixture JSON");
    cmd.add_flag("--live-resolvers", live, "Query the network instead of fixtures");
    cmd.add_option("--reference-now", reference_now, "ISO date used as 'now' for domain ages (live mode)");
    cmd.add_option("--rank-endpoint", rank_endpoint, "Traffic-rank URL template with {host} (live mode)");
  }

  FeatureConfig config() const {
    return feature_config.empty() ? FeatureConfig::defaults() : load_feature_config(feature_config);
  }

  std::unique_ptr<Resolver> resolver() const {
    if (live) {
#if defined(PHISHDET_WITH_LIVE)
      if (!fixtures.empty()) throw UsageError("--fixtures and --live-resolvers are mutually exclusive");
      if (reference_now.empty()) throw UsageError("--live-resolvers needs --reference-now");
      const auto now = parse_iso8601(reference_now);
      if (!now) throw UsageError("--reference-now: '" + reference_now + "' is not an ISO-8601 date");
      LiveResolverOptions opts;
      opts.reference_now = *now;
      opts.rank_endpoint = rank_endpoint;
      return std::make_unique<LiveResolver>(make_network_transport(), opts);
#else
      throw UsageError("this build has no network resolver");
#endif
    }
    if (fixtures.empty()) return std::make_unique<FixtureResolver>(ResolverFixture{});
    return std::make_unique<FixtureResolver>(load_resolver_fixture(fixtures));
  }
};

// Model hyperparameter flags shared by train and sweep.
struct ModelFlags {
  std::string kind = "lr";
  std::string kernel = "poly";
  std::string layers = "100,100";
  std::string activation = "relu";
  double lambda = 0.0;
  std::optional<double> learning_rate;
  std::optional<int> epochs;
  double c = 1.0;
  std::optional<double> gamma;
  std::optional<int> degree;
  std::optional<double> coef0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--model", kind, "Model family")->check(CLI::IsMember({"lr", "ann", "svm"}));
    cmd.add_option("--kernel", kernel, "SVM kernel")->check(CLI::IsMember({"linear", "poly", "rbf", "sigmoid"}));
    cmd.add_option("--layers", layers, "ANN hidden layer sizes, comma-separated");
    cmd.add_option("--activation", activation, "ANN hidden activation")
        ->check(CLI::IsMember({"relu", "tanh", "sigmoid"}));
    cmd.add_option("--lambda", lambda, "L2 regularization strength");
    cmd.add_option("--lr", learning_rate, "Learning rate (default 0.1 for lr, 0.01 for ann)");
    cmd.add_option("--epochs", epochs, "Gradient descent epochs (default 2000)");
    cmd.add_option("--c", c, "SVM penalty C");
    cmd.add_option("--gamma", gamma, "Kernel gamma (default 0.1)");
    cmd.add_option("--degree", degree, "Polynomial kernel degree (default 3)");
    cmd.add_option("--coef0", coef0, "Kernel offset (default 1 for poly, 0 for sigmoid)");
  }

  TrainSpec spec(std::uint64_t seed) const {
    TrainSpec s;
    s.family = *parse_model_family(kind);
    s.lr.lambda = lambda;
    s.ann.lambda = lambda;
    if (learning_rate) {
      s.lr.learning_rate = *learning_rate;
      s.ann.learning_rate = *learning_rate;
    }
    if (epochs) {
      s.lr.epochs = *epochs;
      s.ann.epochs = *epochs;
    }
    s.ann.activation = *parse_activation(activation);
    s.ann.layer_sizes = {kFeatureCount};
    for (std::string_view part : text::split(layers, ',')) {
      part = text::trim(part);
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || v == 0) {
        throw UsageError("--layers: '" + layers + "' is not a list of positive integers");
      }
      s.ann.layer_sizes.push_back(v);
    }
    s.ann.layer_sizes.push_back(1);
    s.ann.rng_seed = seed;
    s.svm.kernel = KernelSpec::defaults(*parse_kernel_kind(kernel));
    if (gamma) s.svm.kernel.gamma = *gamma;
    if (degree) s.svm.kernel.degree = *degree;
    if (coef0) s.svm.kernel.coef0 = *coef0;
    s.svm.c_penalty = c;
    return s;
  }
};

PfaDenominator pfa_mode(const std::string& name) { return *parse_pfa_denominator(name); }

void warn_if_unconverged(const Model& model, std::ostream& err) {
  if (const auto* svm = std::get_if<SvmModel>(&model); svm && !svm->converged) {
    err << "warning: SVM solver stopped at the iteration cap after " << svm->iterations
        << " iterations; the model is the best found so far\n";
  }
}

std::vector<RawEmail> read_messages(const std::string& path) {
  std::string bytes = read_file(path);
  const std::string ext = text::to_lower(fs::path(path).extension().string());
  if (ext == ".eml") return {RawEmail{path, std::move(bytes)}};
  return parse_mbox(bytes, path);
}

std::optional<Label> parse_label(std::string_view s) {
  const std::string l = text::to_lower(text::trim(s));
  if (l == "phishing" || l == "1") return Label::phishing;
  if (l == "legitimate" || l == "0") return Label::legitimate;
  return std::nullopt;
}

std::string fired_features(const FeatureVector& v) {
  std::string out;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (!v.values[j]) continue;
    if (!out.empty()) out += ',';
    out += kFeatureNames[j];
  }
  return out.empty() ? "none" : out;
}

// ---- extract ----------------------------------------------------------------

struct ExtractCmd {
  std::vector<std::string> inputs;
  std::string output;
  std::string label;
  std::string manifest;
  bool dedup = false;
  bool balance = false;
  std::uint64_t seed = 0;
  ResolverFlags resolver;

  int run(std::ostream& out, std::ostream&) const {
    const FeatureConfig config = resolver.config();
    const auto res = resolver.resolver();
    std::optional<Label> default_label;
    if (!label.empty()) {
      default_label = parse_label(label);
      if (!default_label) throw UsageError("--label must be phishing or legitimate");
    }

    std::vector<LabeledEmail> corpus;
    for (const std::string& path : inputs) {
      for (const RawEmail& raw : read_messages(path)) {
        ParsedEmail email = parse_email(raw);
        std::optional<Label> l = default_label;
        if (email.label_hint) {
          l = parse_label(*email.label_hint);
          if (!l) throw Error(Errc::SchemaMismatch, raw.source_path + ": unknown X-Phish-Label '" + *email.label_hint + "'");
        }
        if (!l) throw Error(Errc::SchemaMismatch, raw.source_path + ": no label (pass --label or add X-Phish-Label)");
        corpus.push_back(make_labeled_email(std::move(email), *l, raw.source_path));
      }
    }

    CorpusManifest manifest_data;
    manifest_data.sources = inputs;
    manifest_data.rng_seed = seed;
    if (dedup) {
      DedupResult r = phishdet::dedup(std::move(corpus));
      corpus = std::move(r.kept);
      manifest_data.dedup_removed = r.removed;
    }
    manifest_data.dedup_kept = corpus.size();
    if (balance) corpus = balance_classes(std::move(corpus), seed);

    Dataset data;
    data.features = Matrix(0, kFeatureCount);
    for (const LabeledEmail& item : corpus) {
      const FeatureVector v = extract_vector(item.email, config, *res);
      std::vector<double> row(v.values.begin(), v.values.end());
      data.features.append_row(row);
      data.labels.push_back(static_cast<int>(item.label));
    }
    manifest_data.legitimate = data.count(0);
    manifest_data.phishing = data.count(1);
    save_dataset(data, output);
    if (!manifest.empty()) save_manifest(manifest_data, manifest);
    out << "extracted " << data.size() << " rows (" << manifest_data.phishing << " phishing, "
        << manifest_data.legitimate << " legitimate) to " << output << "\n";
    return kExitOk;
  }
};

// ---- gen-corpus -------------------------------------------------------------

struct GenCorpusCmd {
  std::string spec_path;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_per_class;

  int run(std::ostream& out, std::ostream&) const {
    SyntheticSpec spec = spec_path.empty() ? SyntheticSpec::defaults() : load_synthetic_spec(spec_path);
    if (seed) spec.rng_seed = *seed;
    if (n_per_class) spec.n_per_class = *n_per_class;
    const Dataset data = generate_synthetic_corpus(spec);
    save_dataset(data, output);
    out << "wrote " << data.size() << " rows to " << output << "\n";
    return kExitOk;
  }
};

// ---- train ------------------------------------------------------------------

struct TrainCmd {
  std::string input;
  std::string output;
  std::string test_output;
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  ModelFlags model;

  int run(std::ostream& out, std::ostream& err) const {
    const Dataset data = load_dataset(input);
    Dataset train = data;
    if (train_fraction < 1.0) {
      auto parts = split_dataset(data, SplitSpec{train_fraction, seed, true});
      train = std::move(parts.first);
      if (!test_output.empty()) save_dataset(parts.second, test_output);
    } else if (!test_output.empty()) {
      throw UsageError("--test-output needs --train-fraction below 1");
    }
    const TrainSpec spec = model.spec(seed);
    const ModelBundle bundle = train_bundle(train, spec);
    warn_if_unconverged(bundle.model, err);
    save_model(bundle, output);
    out << "trained " << model_kind(bundle.model) << " on " << train.size() << " rows; model written to " << output
        << "\n";
    return kExitOk;
  }
};

// ---- evaluate ---------------------------------------------------------------

struct EvaluateCmd {
  std::string model_file;
  std::string input;
  std::string output;
  std::string pfa = "standard";

  int run(std::ostream& out, std::ostream&) const {
    const ModelBundle bundle = load_model(model_file);
    const Dataset data = load_dataset(input);
    const Metrics m = evaluate_bundle(bundle, data, pfa_mode(pfa));
    out << metrics_report(m);
    if (!output.empty()) {
      ComparisonTable t;
      t.rows.push_back({std::string(model_kind(bundle.model)), m});
      write_file(output, table_csv(t));
    }
    return kExitOk;
  }
};

// ---- sweep ------------------------------------------------------------------

struct SweepCmd {
  std::string input;
  std::string output;
  std::string grid = "0:1:0.1";
  std::string pfa = "standard";
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  ModelFlags model;

  int run(std::ostream& out, std::ostream&) const {
    std::vector<double> values;
    try {
      values = parse_grid(grid);
    } catch (const Error& e) {
      throw UsageError(std::string("--grid: ") + e.what());
    }
    const PreparedSplit split = prepare_split(load_dataset(input), SplitSpec{train_fraction, seed, true});
    const SweepResult result = regularization_sweep(split, model.spec(seed), values, pfa_mode(pfa));
    const std::string csv = sweep_csv(result);
    if (output.empty()) {
      out << csv;
    } else {
      write_file(output, csv);
      out << "wrote " << values.size() << " sweep rows to " << output << "\n";
    }
    return kExitOk;
  }
};

// ---- grid -------------------------------------------------------------------

struct GridCmd {
  std::string input;
  std::string output;
  std::string report;
  std::string table = "all";
  std::string pfa = "standard";
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  std::optional<int> epochs;
  std::optional<double> learning_rate;

  int run(std::ostream& out, std::ostream&) const {
    const PreparedSplit split = prepare_split(load_dataset(input), SplitSpec{train_fraction, seed, true});
    const PfaDenominator mode = pfa_mode(pfa);
    ComparisonOptions opts;
    opts.ann.rng_seed = seed;
    if (epochs) opts.ann.epochs = *epochs;
    if (learning_rate) opts.ann.learning_rate = *learning_rate;

    std::string text_report;
    std::string csv;
    auto emit = [&](const std::string& title, const ComparisonTable& t) {
      text_report += table_report(title, t) + "\n";
      csv += csv.empty() ? table_csv(t) : table_csv(t).substr(table_csv(t).find('\n') + 1);
    };
    std::optional<ComparisonTable> ann, svm;
    if (table == "ann" || table == "compare" || table == "all") ann = ann_grid(split, opts.ann, mode);
    if (table == "kernels" || table == "compare" || table == "all") svm = kernel_comparison(split, opts.svm, mode);
    if (table == "ann" || table == "all") emit("ANN architectures", *ann);
    if (table == "kernels" || table == "all") emit("SVM kernels", *svm);
    if (table == "compare" || table == "all") emit("Model comparison", model_comparison(split, opts, *ann, *svm, mode));

    out << text_report;
    if (!output.empty()) write_file(output, csv);
    if (!report.empty()) write_file(report, text_report);
    return kExitOk;
  }
};

// ---- classify ---------------------------------------------------------------

struct ClassifyCmd {
  std::string model_file;
  std::string input;
  ResolverFlags resolver;

  int run(std::ostream& out, std::ostream&) const {
    const ModelBundle bundle = load_model(model_file);
    const FeatureConfig config = resolver.config();
    const auto res = resolver.resolver();
    const ParsedEmail email = parse_email(RawEmail{input, read_file(input)});
    const FeatureVector v = extract_vector(email, config, *res);
    const std::vector<double> row(v.values.begin(), v.values.end());
    const double score = model_score(bundle, row);
    const int verdict = model_predict(bundle, row);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", score);
    out << (verdict == 1 ? "phishing" : "legitimate") << " score=" << buf << " fired=" << fired_features(v) << "\n";
    return kExitOk;
  }
};

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::NonFiniteLoss: return kExitDiverged;
    case Errc::InvalidHyperparameter: return kExitUsage;
    default: return kExitData;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phishing email feature extraction, training and evaluation"};
  app.name("phishdet");
  app.require_subcommand(1);

  ExtractCmd extract;
  auto* c_extract = app.add_subcommand("extract", "Parse emails and write their feature vectors as CSV");
  c_extract->add_option("--input", extract.inputs, "mbox or .eml files")->required();
  c_extract->add_option("--output", extract.output, "Output CSV")->required();
  c_extract->add_option("--label", extract.label, "Label for emails without an X-Phish-Label header");
  c_extract->add_flag("--dedup", extract.dedup, "Drop duplicate subject+body pairs");
  c_extract->add_flag("--balance", extract.balance, "Downsample the majority class");
  c_extract->add_option("--seed", extract.seed, "Seed for --balance");
  c_extract->add_option("--manifest", extract.manifest, "Write a JSON corpus manifest");
  extract.resolver.add_to(*c_extract);

  GenCorpusCmd gen;
  auto* c_gen = app.add_subcommand("gen-corpus", "Generate a synthetic feature corpus");
  c_gen->add_option("--input", gen.spec_path, "Synthetic spec JSON (default: built-in)");
  c_gen->add_option("--output", gen.output, "Output CSV")->required();
  c_gen->add_option("--seed", gen.seed, "Override the spec seed");
  c_gen->add_option("--n-per-class", gen.n_per_class, "Override the per-class row count");

  TrainCmd train;
  auto* c_train = app.add_subcommand("train", "Train a model on a feature CSV");
  c_train->add_option("--input", train.input, "Feature CSV")->required();
  c_train->add_option("--output", train.output, "Model file")->required();
  c_train->add_option("--seed", train.seed, "Split and initialization seed");
  c_train->add_option("--train-fraction", train.train_fraction, "Training share of a stratified split (1 = all rows)")
      ->check(CLI::Range(0.0, 1.0));
  c_train->add_option("--test-output", train.test_output, "Write the held-out rows as CSV");
  train.model.add_to(*c_train);

  EvaluateCmd evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Score a model on a feature CSV");
  c_eval->add_option("--model-file", evaluate.model_file, "Model file")->required();
  c_eval->add_option("--input", evaluate.input, "Feature CSV")->required();
  c_eval->add_option("--output", evaluate.output, "Metrics CSV");
  c_eval->add_option("--pfa-denominator", evaluate.pfa, "standard: fp/(fp+tn), paper: fp/(tp+fn)")
      ->check(CLI::IsMember({"standard", "paper"}));

  SweepCmd sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Metrics as a function of lambda (lr, ann) or C (svm)");
  c_sweep->add_option("--input", sweep.input, "Feature CSV")->required();
  c_sweep->add_option("--output", sweep.output, "Sweep CSV (default: stdout)");
  c_sweep->add_option("--grid", sweep.grid, "'a:b:step' or a comma-separated list");
  c_sweep->add_option("--seed", sweep.seed, "Split and initialization seed");
  c_sweep->add_option("--train-fraction", sweep.train_fraction, "Training share")->check(CLI::Range(0.0, 1.0));
  c_sweep->add_option("--pfa-denominator", sweep.pfa, "standard or paper")->check(CLI::IsMember({"standard", "paper"}));
  sweep.model.add_to(*c_sweep);

  GridCmd grid;
  auto* c_grid = app.add_subcommand("grid", "ANN architecture grid, SVM kernel table and model comparison");
  c_grid->add_option("--input", grid.input, "Feature CSV")->required();
  c_grid->add_option("--table", grid.table, "Which table")->check(CLI::IsMember({"ann", "kernels", "compare", "all"}));
  c_grid->add_option("--output", grid.output, "CSV of all emitted rows");
  c_grid->add_option("--report", grid.report, "Plain-text report");
  c_grid->add_option("--seed", grid.seed, "Split and initialization seed");
  c_grid->add_option("--train-fraction", grid.train_fraction, "Training share")->check(CLI::Range(0.0, 1.0));
  c_grid->add_option("--epochs", grid.epochs, "ANN epochs (default 2000)");
  c_grid->add_option("--lr", grid.learning_rate, "ANN learning rate (default 0.01)");
  c_grid->add_option("--pfa-denominator", grid.pfa, "standard or paper")->check(CLI::IsMember({"standard", "paper"}));

  ClassifyCmd classify;
  auto* c_classify = app.add_subcommand("classify", "Classify one .eml file");
  c_classify->add_option("--model-file", classify.model_file, "Model file")->required();
  c_classify->add_option("--input", classify.input, ".eml file")->required();
  classify.resolver.add_to(*c_classify);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "phishdet: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (c_extract->parsed()) return extract.run(out, err);
    if (c_gen->parsed()) return gen.run(out, err);
    if (c_train->parsed()) return train.run(out, err);
    if (c_eval->parsed()) return evaluate.run(out, err);
    if (c_sweep->parsed()) return sweep.run(out, err);
    if (c_grid->parsed()) return grid.run(out, err);
    if (c_classify->parsed()) return classify.run(out, err);
  } catch (const UsageError& e) {
    err << "phishdet: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "phishdet: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "phishdet: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace phishdet::cli
