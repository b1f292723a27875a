#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phishdet {

enum class Errc {
  MalformedEmail,
  MalformedMbox,
  ResolutionFailed,
  TooManyHops,
  InvalidFixture,
  InvalidConfig,
  DimensionMismatch,
  SingleClassData,
  NonFiniteLoss,
  InvalidHyperparameter,
  UnsupportedVersion,
  CorruptModelFile,
  UnknownCategory,
  EmptyDataset,
  InsufficientData,
  LengthMismatch,
  DegenerateTestSet,
  SchemaMismatch,
  NonBinaryFeatureValue,
  Io,
};

std::string_view to_string(Errc code) noexcept;

// Every library failure is reported as an Error carrying one of the codes
// above; callers that need to branch inspect code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace phishdet
