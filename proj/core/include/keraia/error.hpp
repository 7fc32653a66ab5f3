#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace keraia {

enum class ErrorCode {
  UnknownCloud,
  UnknownKS,
  AppellationConflict,
  PathThroughScalar,
  InvalidPath,
  CloudCycle,
  SyntaxError,
  UnresolvedReference,
  DuplicateAppellation,
  IncludeCycle,
  UnknownSegment,
  AmbiguousSegment,
  TypeMismatch,
  UnknownPath,
  Unresolvable,
  InheritanceCycle,
  CycleLimitExceeded,
  UnboundVariable,
  UnknownResponder,
  CascadeLimitExceeded,
  NonNumericValue,
  UnknownLoT,
  ForkPredicateError,
  DepthLimitExceeded,
  EmptyCandidates,
  MissingInput,
  OutputCollision,
  InvalidTransformation,
  UnknownTemplate,
  UnknownPlayer,
  IllegalCommand,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every domain failure in the engine is reported through this one type; the
// code is the stable contract, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace keraia
