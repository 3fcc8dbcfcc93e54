#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddes {

enum class ErrorCode {
  // construction / core
  NegativeWeight,
  ZeroTotalMass,
  LengthMismatch,
  NegativeCell,
  ShapeMismatch,
  IndexOutOfRange,
  PointOutOfDomain,
  InvalidGeometry,
  InvalidEmotionSet,
  NotNormalized,
  // conversion
  SigmaNonPositive,
  InvalidParams,
  // aggregation
  UnresolvableLabel,
  EmptyInput,
  EmptyCloud,
  SingularBandwidth,
  SourceRangeEmpty,
  OutOfRange,
  // lexicon
  FileNotFound,
  MalformedRow,
  DuplicateWord,
  ValueOutOfRange,
  WordNotFound,
  // metrics / analysis
  SetMismatch,
  DegenerateInput,
  ZeroVariance,
  EmptyBatch,
  KOutOfRange,
  // file formats
  BadFormat,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; what() is "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ddes
