#pragma once

#include <stdexcept>
#include <string>

namespace qpspec {

// Every recoverable failure in the library throws Error with one of these
// codes. Tests and the CLI dispatch on the code, not on the message text.
enum class ErrorCode {
  NonHermitianInput,
  DimensionZero,
  IterationLimit,
  NonPositiveWeight,
  EmptyAfterWindow,
  InsufficientSamples,
  DegenerateFit,
  PrecisionExhausted,
  NotEnoughElements,
  UnknownLetter,
  GenerationTooLarge,
  NotPrimitive,
  EmptyWord,
  GridTooCoarse,
  MeshTooCoarse,
  TruncationTooSmall,
  IndefiniteWeight,
  NotInGap,
  TruncationSuspect,
  ConfigError,
  InvalidArgument,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::DimensionZero: return "DimensionZero";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::EmptyAfterWindow: return "EmptyAfterWindow";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::NotEnoughElements: return "NotEnoughElements";
    case ErrorCode::UnknownLetter: return "UnknownLetter";
    case ErrorCode::GenerationTooLarge: return "GenerationTooLarge";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::EmptyWord: return "EmptyWord";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::IndefiniteWeight: return "IndefiniteWeight";
    case ErrorCode::NotInGap: return "NotInGap";
    case ErrorCode::TruncationSuspect: return "TruncationSuspect";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace qpspec
