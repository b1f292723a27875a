#include "phishdet/corpus/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "phishdet/error.hpp"
#include "phishdet/ml/rng.hpp"
#include "phishdet/util/text.hpp"

namespace phishdet {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

std::string csv_header() {
  std::string h;
  for (std::size_t j = 1; j <= kFeatureCount; ++j) h += "f" + std::to_string(j) + ",";
  return h + "label";
}

std::array<double, kFeatureCount> probabilities(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != kFeatureCount) {
    throw Error(Errc::InvalidConfig, std::string("'") + key + "' must be an array of 10 probabilities");
  }
  std::array<double, kFeatureCount> out{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (!doc[key][j].is_number()) throw Error(Errc::InvalidConfig, std::string("'") + key + "' holds a non-number");
    out[j] = doc[key][j].get<double>();
  }
  return out;
}

}  // namespace

DedupKey dedup_key(const ParsedEmail& email) {
  const std::string normalized = text::fold_and_collapse(email.subject) + '\n' + text::fold_and_collapse(email.body_text);
  DedupKey key{};
  unsigned int len = 0;
  if (EVP_Digest(normalized.data(), normalized.size(), key.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != key.size()) {
    throw Error(Errc::Io, "SHA-256 digest failed");
  }
  return key;
}

std::string to_hex(const DedupKey& key) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(key.size() * 2);
  for (std::uint8_t b : key) {
    out += digits[b >> 4];
    out += digits[b & 0xF];
  }
  return out;
}

LabeledEmail make_labeled_email(ParsedEmail email, Label label, std::string source) {
  LabeledEmail out;
  out.key = dedup_key(email);
  out.email = std::move(email);
  out.label = label;
  out.source = std::move(source);
  return out;
}

DedupResult dedup(std::vector<LabeledEmail> corpus) {
  DedupResult result;
  std::set<DedupKey> seen;
  for (auto& item : corpus) {
    if (seen.insert(item.key).second) {
      result.kept.push_back(std::move(item));
    } else {
      ++result.removed;
    }
  }
  return result;
}

std::vector<LabeledEmail> balance_classes(std::vector<LabeledEmail> corpus, std::uint64_t rng_seed) {
  std::vector<std::size_t> legit, phish;
  for (std::size_t i = 0; i < corpus.size(); ++i) (corpus[i].label == Label::phishing ? phish : legit).push_back(i);
  if (legit.empty() || phish.empty()) {
    throw Error(Errc::SingleClassData, "cannot balance: " + std::to_string(legit.size()) + " legitimate, " +
                                           std::to_string(phish.size()) + " phishing");
  }
  std::vector<std::size_t>& majority = legit.size() > phish.size() ? legit : phish;
  const std::size_t target = std::min(legit.size(), phish.size());
  std::vector<bool> keep(corpus.size(), true);
  if (majority.size() > target) {
    Rng rng(rng_seed);
    rng.shuffle(majority.begin(), majority.end());
    for (std::size_t t = target; t < majority.size(); ++t) keep[majority[t]] = false;
  }
  std::vector<LabeledEmail> out;
  out.reserve(2 * target);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) out.push_back(std::move(corpus[i]));
  }
  return out;
}

SyntheticSpec SyntheticSpec::defaults() {
  SyntheticSpec s;
  s.n_per_class = 2000;
  s.p_legitimate = {0.15, 0.10, 0.06, 0.10, 0.08, 0.03, 0.20, 0.20, 0.30, 0.02};
  s.p_phishing = {0.75, 0.40, 0.70, 0.35, 0.60, 0.45, 0.50, 0.50, 0.60, 0.40};
  s.rng_seed = 42;
  return s;
}

void SyntheticSpec::validate() const {
  if (n_per_class < 1) throw Error(Errc::InvalidConfig, "n_per_class must be >= 1");
  auto check = [](const std::array<double, kFeatureCount>& p, const char* name) {
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::InvalidConfig, std::string(name) + " probabilities must lie in [0, 1]");
    }
  };
  check(p_legitimate, "p_legitimate");
  check(p_phishing, "p_phishing");
}

SyntheticSpec parse_synthetic_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("synthetic spec is not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) throw Error(Errc::InvalidConfig, "synthetic spec must be a JSON object");
  static const std::set<std::string> known{"n_per_class", "p_legitimate", "p_phishing", "seed"};
  for (const auto& [k, v] : doc.items()) {
    if (!known.count(k)) throw Error(Errc::InvalidConfig, "unknown key '" + k + "' in synthetic spec");
  }
  SyntheticSpec s;
  if (!doc.contains("n_per_class") || !doc["n_per_class"].is_number_unsigned()) {
    throw Error(Errc::InvalidConfig, "'n_per_class' must be a positive integer");
  }
  s.n_per_class = doc["n_per_class"].get<std::size_t>();
  s.p_legitimate = probabilities(doc, "p_legitimate");
  s.p_phishing = probabilities(doc, "p_phishing");
  if (!doc.contains("seed") || !doc["seed"].is_number_unsigned()) {
    throw Error(Errc::InvalidConfig, "'seed' must be a non-negative integer");
  }
  s.rng_seed = doc["seed"].get<std::uint64_t>();
  s.validate();
  return s;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) { return parse_synthetic_spec(read_file(path)); }

Dataset generate_synthetic_corpus(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.rng_seed);
  Dataset out;
  out.features = Matrix(2 * spec.n_per_class, kFeatureCount);
  out.labels.reserve(2 * spec.n_per_class);
  std::size_t row = 0;
  for (int label : {0, 1}) {
    const auto& p = label == 1 ? spec.p_phishing : spec.p_legitimate;
    for (std::size_t i = 0; i < spec.n_per_class; ++i, ++row) {
      for (std::size_t j = 0; j < kFeatureCount; ++j) out.features(row, j) = rng.bernoulli(p[j]) ? 1.0 : 0.0;
      out.labels.push_back(label);
    }
  }
  return out;
}

std::string write_dataset_csv(const Dataset& data) {
  data.validate();
  if (data.dim() != kFeatureCount && data.size() > 0) {
    throw Error(Errc::SchemaMismatch, "dataset has " + std::to_string(data.dim()) + " columns, expected 10");
  }
  std::string out = csv_header() + '\n';
  char buf[40];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features.row(i)) {
      if (v == 0.0 || v == 1.0) {
        out += v == 1.0 ? '1' : '0';
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
      out += ',';
    }
    out += std::to_string(data.labels[i]);
    out += '\n';
  }
  return out;
}

Dataset read_dataset_csv(std::string_view content, bool require_binary) {
  std::vector<std::string_view> lines;
  for (std::string_view line : text::split(content, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != csv_header()) {
    throw Error(Errc::SchemaMismatch, "expected header '" + csv_header() + "'");
  }
  Dataset out;
  out.features = Matrix(lines.size() - 1, kFeatureCount);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = text::split(lines[r], ',');
    const std::string where = "line " + std::to_string(r + 1);
    if (cells.size() != kFeatureCount + 1) {
      throw Error(Errc::SchemaMismatch, where + ": expected 11 columns, got " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const std::string_view cell = text::trim(cells[j]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
        throw Error(Errc::SchemaMismatch, where + ": '" + std::string(cell) + "' is not a number");
      }
      if (require_binary && v != 0.0 && v != 1.0) {
        throw Error(Errc::NonBinaryFeatureValue, where + ": feature f" + std::to_string(j + 1) + " is " +
                                                     std::string(cell));
      }
      out.features(r - 1, j) = v;
    }
    const std::string_view lab = text::trim(cells[kFeatureCount]);
    if (lab != "0" && lab != "1") throw Error(Errc::SchemaMismatch, where + ": label '" + std::string(lab) + "' is not 0 or 1");
    out.labels.push_back(lab == "1" ? 1 : 0);
  }
  return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) { write_file(path, write_dataset_csv(data)); }

Dataset load_dataset(const std::filesystem::path& path, bool require_binary) {
  try {
    return read_dataset_csv(read_file(path), require_binary);
  } catch (const Error& e) {
    if (e.code() == Errc::Io) throw;
    throw Error(e.code(), path.string() + ": " + std::string(e.what()).substr(to_string(e.code()).size() + 2));
  }
}

std::string to_json(const CorpusManifest& m) {
  json doc = json::object();
  doc["counts"] = {{"legitimate", m.legitimate}, {"phishing", m.phishing}};
  doc["sources"] = m.sources;
  doc["dedup"] = {{"kept", m.dedup_kept}, {"removed", m.dedup_removed}};
  doc["seed"] = m.rng_seed;
  return doc.dump(2) + '\n';
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  write_file(path, to_json(manifest));
}

}  // namespace phishdet
