#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maxstab {

enum class ErrorCode {
  OutOfDomain,
  NotConditionallyNegativeDefinite,
  NotPositiveDefinite,
  ShapeMismatch,
  NonFinite,
  Overflow,
  DimensionTooLarge,
  MissingBlockValue,
  NonFiniteBlockValue,
  NotSPD,
  MaxSubdivisions,
  NonFiniteIntegrand,
  CdfNotConverged,
  NegativeDensityTerm,
  NotOnFace,
  UnsupportedModel,
  NotIdentifiable,
  NonPositivePartitionSum,
  LikelihoodUnderflow,
  UnsupportedMethod,
  NoImprovement,
  MaxIterations,
  Singular,
  Infeasible,
  IterationGuard,
  TooManyFailures,
  EmptyData,
  InvalidArgument,
  IoError,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. All library failures are
/// reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace maxstab
