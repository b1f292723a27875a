#include "phishdet/ml/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "phishdet/error.hpp"

namespace phishdet {
namespace {

using nlohmann::json;

// Minimal writer so number formatting is under our control.
class Writer {
 public:
  std::string str() const { return out_; }

  void open(char c) { out_ += c; first_ = true; ++depth_; }
  void close(char c) {
    --depth_;
    newline();
    out_ += c;
    first_ = false;
  }
  void key(std::string_view k) {
    sep();
    out_ += '"';
    out_ += k;
    out_ += "\": ";
  }
  // Starts an unnamed array element.
  void item() { sep(); }
  void value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    out_ += buf;
  }
  void value(std::uint64_t v) { out_ += std::to_string(v); }
  void value(int v) { out_ += std::to_string(v); }
  void value(bool v) { out_ += v ? "true" : "false"; }
  void value(std::string_view s) {
    out_ += '"';
    out_ += s;
    out_ += '"';
  }
  template <typename T>
  void field(std::string_view k, const T& v) {
    key(k);
    value(v);
  }
  template <typename T>
  void array(std::string_view k, std::span<const T> values) {
    key(k);
    out_ += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ += ", ";
      value(values[i]);
    }
    out_ += ']';
  }

 private:
  void sep() {
    if (!first_) out_ += ',';
    newline();
    first_ = false;
  }
  void newline() {
    out_ += '\n';
    out_.append(static_cast<std::size_t>(depth_) * 2, ' ');
  }

  std::string out_;
  bool first_ = true;
  int depth_ = 0;
};

void write_matrix(Writer& w, std::string_view k, const Matrix& m) {
  w.key(k);
  w.open('{');
  w.field("rows", static_cast<std::uint64_t>(m.rows()));
  w.field("cols", static_cast<std::uint64_t>(m.cols()));
  w.array<double>("values", m.values());
  w.close('}');
}

void write_model(Writer& w, const LogisticModel& m) {
  w.key("hyperparameters");
  w.open('{');
  w.field("lambda", m.lambda);
  w.field("learning_rate", m.learning_rate);
  w.field("epochs", m.epochs);
  w.close('}');
  w.key("parameters");
  w.open('{');
  w.array<double>("weights", m.weights);
  w.close('}');
}

void write_model(Writer& w, const AnnModel& m) {
  w.key("hyperparameters");
  w.open('{');
  std::vector<std::uint64_t> sizes(m.layer_sizes.begin(), m.layer_sizes.end());
  w.array<std::uint64_t>("layer_sizes", sizes);
  w.field("activation", to_string(m.activation));
  w.field("lambda", m.lambda);
  w.field("learning_rate", m.learning_rate);
  w.field("epochs", m.epochs);
  w.field("rng_seed", m.rng_seed);
  w.close('}');
  w.key("parameters");
  w.open('{');
  w.key("layers");
  w.open('[');
  for (const AnnLayer& layer : m.layers) {
    w.item();
    w.open('{');
    write_matrix(w, "weights", layer.weights);
    w.array<double>("biases", layer.biases);
    w.close('}');
  }
  w.close(']');
  w.close('}');
}

void write_model(Writer& w, const SvmModel& m) {
  w.key("hyperparameters");
  w.open('{');
  w.field("kernel", to_string(m.kernel.kind));
  w.field("degree", m.kernel.degree);
  w.field("gamma", m.kernel.gamma);
  w.field("coef0", m.kernel.coef0);
  w.field("c", m.c_penalty);
  w.field("tol", m.tol);
  w.close('}');
  w.key("parameters");
  w.open('{');
  write_matrix(w, "support_vectors", m.support_vectors);
  w.array<int>("support_labels", m.support_labels);
  w.array<double>("alphas", m.alphas);
  w.field("bias", m.bias);
  w.field("converged", m.converged);
  w.field("iterations", static_cast<std::uint64_t>(m.iterations));
  w.close('}');
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(Errc::CorruptModelFile, what); }

const json& member(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) corrupt(std::string("missing field '") + key + "'");
  return obj.at(key);
}

double real(const json& obj, const char* key) {
  const json& v = member(obj, key);
  if (!v.is_number()) corrupt(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

template <typename T>
T integer(const json& obj, const char* key) {
  const json& v = member(obj, key);
  if (!v.is_number_integer()) corrupt(std::string("field '") + key + "' is not an integer");
  return v.get<T>();
}

template <typename T>
std::vector<T> list(const json& obj, const char* key) {
  const json& v = member(obj, key);
  if (!v.is_array()) corrupt(std::string("field '") + key + "' is not an array");
  std::vector<T> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number() || (std::is_integral_v<T> && !e.is_number_integer())) {
      corrupt(std::string("field '") + key + "' holds a non-numeric entry");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

std::string text(const json& obj, const char* key) {
  const json& v = member(obj, key);
  if (!v.is_string()) corrupt(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

Matrix read_matrix(const json& obj, const char* key) {
  const json& m = member(obj, key);
  const auto rows = integer<std::size_t>(m, "rows");
  const auto cols = integer<std::size_t>(m, "cols");
  const auto values = list<double>(m, "values");
  if (values.size() != rows * cols) corrupt(std::string("matrix '") + key + "' has the wrong number of values");
  Matrix out(rows, cols);
  std::copy(values.begin(), values.end(), out.values().begin());
  return out;
}

LogisticModel read_lr(const json& hyper, const json& params) {
  LogisticModel m;
  m.lambda = real(hyper, "lambda");
  m.learning_rate = real(hyper, "learning_rate");
  m.epochs = integer<int>(hyper, "epochs");
  m.weights = list<double>(params, "weights");
  if (m.weights.size() < 2) corrupt("logistic model needs a bias and at least one weight");
  return m;
}

AnnModel read_ann(const json& hyper, const json& params) {
  AnnModel m;
  m.layer_sizes = list<std::size_t>(hyper, "layer_sizes");
  const auto act = parse_activation(text(hyper, "activation"));
  if (!act) corrupt("unknown activation");
  m.activation = *act;
  m.lambda = real(hyper, "lambda");
  m.learning_rate = real(hyper, "learning_rate");
  m.epochs = integer<int>(hyper, "epochs");
  m.rng_seed = integer<std::uint64_t>(hyper, "rng_seed");
  const json& layers = member(params, "layers");
  if (!layers.is_array()) corrupt("field 'layers' is not an array");
  for (const json& l : layers) m.layers.push_back(AnnLayer{read_matrix(l, "weights"), list<double>(l, "biases")});
  if (m.layer_sizes.size() < 2 || m.layer_sizes.back() != 1 || m.layers.size() + 1 != m.layer_sizes.size()) {
    corrupt("network shape is inconsistent");
  }
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const AnnLayer& layer = m.layers[l];
    if (layer.weights.rows() != m.layer_sizes[l] || layer.weights.cols() != m.layer_sizes[l + 1] ||
        layer.biases.size() != m.layer_sizes[l + 1]) {
      corrupt("layer " + std::to_string(l) + " does not match layer_sizes");
    }
  }
  return m;
}

SvmModel read_svm(const json& hyper, const json& params) {
  SvmModel m;
  const auto kind = parse_kernel_kind(text(hyper, "kernel"));
  if (!kind) corrupt("unknown kernel");
  m.kernel.kind = *kind;
  m.kernel.degree = integer<int>(hyper, "degree");
  m.kernel.gamma = real(hyper, "gamma");
  m.kernel.coef0 = real(hyper, "coef0");
  m.c_penalty = real(hyper, "c");
  m.tol = real(hyper, "tol");
  m.support_vectors = read_matrix(params, "support_vectors");
  m.support_labels = list<int>(params, "support_labels");
  m.alphas = list<double>(params, "alphas");
  m.bias = real(params, "bias");
  const json& conv = member(params, "converged");
  if (!conv.is_boolean()) corrupt("field 'converged' is not a boolean");
  m.converged = conv.get<bool>();
  m.iterations = integer<std::size_t>(params, "iterations");
  const std::size_t n = m.support_vectors.rows();
  if (m.support_labels.size() != n || m.alphas.size() != n) corrupt("support vector arrays differ in length");
  return m;
}

}  // namespace

std::string_view model_kind(const Model& model) noexcept {
  switch (model.index()) {
    case 0: return "lr";
    case 1: return "ann";
    default: return "svm";
  }
}

std::string serialize_model(const ModelBundle& bundle) {
  Writer w;
  w.open('{');
  w.field("format", std::string_view("phishdet-model"));
  w.field("version", kModelFormatVersion);
  w.field("kind", model_kind(bundle.model));
  std::visit([&](const auto& m) { write_model(w, m); }, bundle.model);
  if (bundle.standardizer) {
    w.key("standardizer");
    w.open('{');
    w.array<double>("means", bundle.standardizer->means);
    w.array<double>("stds", bundle.standardizer->stds);
    w.close('}');
  }
  w.close('}');
  return w.str() + '\n';
}

ModelBundle deserialize_model(std::string_view text_in) {
  json doc;
  try {
    doc = json::parse(text_in.begin(), text_in.end());
  } catch (const json::exception& e) {
    corrupt(std::string("not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object() || !doc.contains("format") || doc["format"] != "phishdet-model") {
    corrupt("not a phishdet model file");
  }
  const int version = integer<int>(doc, "version");
  if (version != kModelFormatVersion) {
    throw Error(Errc::UnsupportedVersion, "model format version " + std::to_string(version) + " (supported: " +
                                              std::to_string(kModelFormatVersion) + ")");
  }
  const std::string kind = text(doc, "kind");
  const json& hyper = member(doc, "hyperparameters");
  const json& params = member(doc, "parameters");
  ModelBundle bundle;
  try {
    if (kind == "lr") {
      bundle.model = read_lr(hyper, params);
    } else if (kind == "ann") {
      bundle.model = read_ann(hyper, params);
    } else if (kind == "svm") {
      bundle.model = read_svm(hyper, params);
    } else {
      corrupt("unknown model kind '" + kind + "'");
    }
    if (doc.contains("standardizer")) {
      const json& s = doc["standardizer"];
      Standardizer st{list<double>(s, "means"), list<double>(s, "stds")};
      if (st.means.size() != st.stds.size()) corrupt("standardizer arrays differ in length");
      bundle.standardizer = std::move(st);
    }
  } catch (const json::exception& e) {
    corrupt(std::string("bad value (") + e.what() + ")");
  }
  return bundle;
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << serialize_model(bundle);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

double model_score(const ModelBundle& bundle, std::span<const double> raw_row) {
  std::vector<double> scaled;
  std::span<const double> x = raw_row;
  if (bundle.standardizer) {
    scaled = bundle.standardizer->apply(raw_row);
    x = scaled;
  }
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LogisticModel>) return lr_hypothesis(m, x);
        else if constexpr (std::is_same_v<T, AnnModel>) return ann_output(m, x);
        else return svm_decision(m, x);
      },
      bundle.model);
}

int model_predict(const ModelBundle& bundle, std::span<const double> raw_row) {
  const double s = model_score(bundle, raw_row);
  if (std::holds_alternative<SvmModel>(bundle.model)) return s >= 0.0 ? 1 : 0;
  return s > 0.5 ? 1 : 0;
}

std::vector<int> model_predict_all(const ModelBundle& bundle, const Dataset& raw) {
  std::vector<int> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.features.rows(); ++i) out.push_back(model_predict(bundle, raw.features.row(i)));
  return out;
}

}  // namespace phishdet
