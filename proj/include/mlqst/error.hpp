#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlqst {

enum class ErrorCode {
  NotHermitian,
  NotPositive,
  TraceNotOne,
  NotNormalized,
  NotSquare,
  DimensionMismatch,
  DimensionTooLarge,
  InvalidDimension,
  SolverFailure,
  DegenerateState,
  EtaOutOfRange,
  ZeroProbability,
  InvalidDataset,
  Overflow,
  DegenerateUpdate,
  NonPositiveUpdate,
  InvalidStopSpec,
  NegativeArgument,
  ProbabilityOutOfRange,
  BracketFailure,
  InvalidScenario,
  InvalidArgument,
  ParseError,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; code() is the
// machine-readable part, what() carries the diagnostic text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlqst
