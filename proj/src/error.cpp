#include "ddes/error.hpp"

namespace ddes {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::ZeroTotalMass: return "ZeroTotalMass";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NegativeCell: return "NegativeCell";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::PointOutOfDomain: return "PointOutOfDomain";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::InvalidEmotionSet: return "InvalidEmotionSet";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::SigmaNonPositive: return "SigmaNonPositive";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::UnresolvableLabel: return "UnresolvableLabel";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::SingularBandwidth: return "SingularBandwidth";
    case ErrorCode::SourceRangeEmpty: return "SourceRangeEmpty";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateWord: return "DuplicateWord";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::WordNotFound: return "WordNotFound";
    case ErrorCode::SetMismatch: return "SetMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::BadFormat: return "BadFormat";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace ddes
