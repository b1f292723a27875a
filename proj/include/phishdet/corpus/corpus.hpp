#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "phishdet/email/email.hpp"
#include "phishdet/features/features.hpp"
#include "phishdet/ml/dataset.hpp"

namespace phishdet {

using DedupKey = std::array<std::uint8_t, 32>;

// SHA-256 of the case-folded, whitespace-collapsed subject and body.
DedupKey dedup_key(const ParsedEmail& email);
std::string to_hex(const DedupKey& key);

struct LabeledEmail {
  ParsedEmail email;
  Label label = Label::legitimate;
  DedupKey key{};
  std::string source;
};

LabeledEmail make_labeled_email(ParsedEmail email, Label label, std::string source = {});

struct DedupResult {
  std::vector<LabeledEmail> kept;
  std::size_t removed = 0;
};

// First occurrence of each key survives, order preserved.
DedupResult dedup(std::vector<LabeledEmail> corpus);

// Downsamples the majority class to the minority count; retained records
// keep their relative order. Throws SingleClassData.
std::vector<LabeledEmail> balance_classes(std::vector<LabeledEmail> corpus, std::uint64_t rng_seed);

struct SyntheticSpec {
  std::size_t n_per_class = 2000;
  std::array<double, kFeatureCount> p_legitimate{};
  std::array<double, kFeatureCount> p_phishing{};
  std::uint64_t rng_seed = 0;

  static SyntheticSpec defaults();
  // Throws InvalidConfig.
  void validate() const;
  bool operator==(const SyntheticSpec&) const = default;
};

// JSON object {n_per_class, p_legitimate[10], p_phishing[10], seed}; unknown
// keys rejected. Throws InvalidConfig.
SyntheticSpec parse_synthetic_spec(std::string_view json_text);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

// n_per_class legitimate rows followed by n_per_class phishing rows, each
// component drawn independently with its class's firing probability.
Dataset generate_synthetic_corpus(const SyntheticSpec& spec);

// CSV with header f1..f10,label. Rows made only of 0/1 values are written as
// integers, anything else with 17 significant digits.
std::string write_dataset_csv(const Dataset& data);
// require_binary: reject feature values other than 0/1 with
// NonBinaryFeatureValue. Structural problems raise SchemaMismatch.
Dataset read_dataset_csv(std::string_view text, bool require_binary = false);

void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path, bool require_binary = false);

struct CorpusManifest {
  std::size_t legitimate = 0;
  std::size_t phishing = 0;
  std::vector<std::string> sources;
  std::size_t dedup_kept = 0;
  std::size_t dedup_removed = 0;
  std::uint64_t rng_seed = 0;

  bool operator==(const CorpusManifest&) const = default;
};

std::string to_json(const CorpusManifest& manifest);
void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);

}  // namespace phishdet
