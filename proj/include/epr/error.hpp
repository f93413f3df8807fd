#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epr {

enum class ErrorCode {
  NonSquare,
  NotHermitian,
  NoConvergence,
  ShapeMismatch,
  DimensionMismatch,
  InvalidArgument,
  // tensor / analysis
  ZeroState,
  NotInAlgebra,
  WeightMismatch,
  BlocksNotOrthogonal,
  NotIsometry,
  NotMaximalEpr,
  // measurement
  NotNormalized,
  GraphUndefined,
  PreconditionFailed,
  // finite systems
  DuplicateValues,
  NotPositive,
  // continuum limit
  CellOutOfRange,
  QuadratureFailure,
  // io
  ParseError,
  SchemaError,
  InvariantError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroState: return "ZeroState";
    case ErrorCode::NotInAlgebra: return "NotInAlgebra";
    case ErrorCode::WeightMismatch: return "WeightMismatch";
    case ErrorCode::BlocksNotOrthogonal: return "BlocksNotOrthogonal";
    case ErrorCode::NotIsometry: return "NotIsometry";
    case ErrorCode::NotMaximalEpr: return "NotMaximalEpr";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::GraphUndefined: return "GraphUndefined";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::DuplicateValues: return "DuplicateValues";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::CellOutOfRange: return "CellOutOfRange";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvariantError: return "InvariantError";
  }
  return "Unknown";
}

/// Numerical failures (as opposed to bad input) map to CLI exit code 2.
inline bool is_numerical_failure(ErrorCode code) {
  return code == ErrorCode::NoConvergence || code == ErrorCode::QuadratureFailure;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace epr
