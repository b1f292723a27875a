#include "phishdet/error.hpp"

namespace phishdet {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedEmail: return "MalformedEmail";
    case Errc::MalformedMbox: return "MalformedMbox";
    case Errc::ResolutionFailed: return "ResolutionFailed";
    case Errc::TooManyHops: return "TooManyHops";
    case Errc::InvalidFixture: return "InvalidFixture";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingleClassData: return "SingleClassData";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::InvalidHyperparameter: return "InvalidHyperparameter";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::CorruptModelFile: return "CorruptModelFile";
    case Errc::UnknownCategory: return "UnknownCategory";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateTestSet: return "DegenerateTestSet";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::NonBinaryFeatureValue: return "NonBinaryFeatureValue";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace phishdet
