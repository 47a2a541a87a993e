#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aml {

enum class ErrorCode {
  DuplicateName,
  EmptyTerm,
  UnknownConstant,
  UnknownTarget,
  UnknownAtom,
  MixedAlgebras,
  DualElementGiven,
  NoDiscriminantPossible,
  InconsistentInput,
  TraceConstraintMissing,
  InconsistentTrainingSet,
  InvalidBoardConfig,
  SizeLimitExceeded,
  DimensionMismatch,
  UndecidedSquares,
  BadMagic,
  CountMismatch,
  TruncatedFile,
  ParseError,
  IoError,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::EmptyTerm: return "EmptyTerm";
    case ErrorCode::UnknownConstant: return "UnknownConstant";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::UnknownAtom: return "UnknownAtom";
    case ErrorCode::MixedAlgebras: return "MixedAlgebras";
    case ErrorCode::DualElementGiven: return "DualElementGiven";
    case ErrorCode::NoDiscriminantPossible: return "NoDiscriminantPossible";
    case ErrorCode::InconsistentInput: return "InconsistentInput";
    case ErrorCode::TraceConstraintMissing: return "TraceConstraintMissing";
    case ErrorCode::InconsistentTrainingSet: return "InconsistentTrainingSet";
    case ErrorCode::InvalidBoardConfig: return "InvalidBoardConfig";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UndecidedSquares: return "UndecidedSquares";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aml
