#include "keraia/error.hpp"

namespace keraia {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownCloud: return "UnknownCloud";
    case ErrorCode::UnknownKS: return "UnknownKS";
    case ErrorCode::AppellationConflict: return "AppellationConflict";
    case ErrorCode::PathThroughScalar: return "PathThroughScalar";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::CloudCycle: return "CloudCycle";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnresolvedReference: return "UnresolvedReference";
    case ErrorCode::DuplicateAppellation: return "DuplicateAppellation";
    case ErrorCode::IncludeCycle: return "IncludeCycle";
    case ErrorCode::UnknownSegment: return "UnknownSegment";
    case ErrorCode::AmbiguousSegment: return "AmbiguousSegment";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::UnknownPath: return "UnknownPath";
    case ErrorCode::Unresolvable: return "Unresolvable";
    case ErrorCode::InheritanceCycle: return "InheritanceCycle";
    case ErrorCode::CycleLimitExceeded: return "CycleLimitExceeded";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::UnknownResponder: return "UnknownResponder";
    case ErrorCode::CascadeLimitExceeded: return "CascadeLimitExceeded";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::UnknownLoT: return "UnknownLoT";
    case ErrorCode::ForkPredicateError: return "ForkPredicateError";
    case ErrorCode::DepthLimitExceeded: return "DepthLimitExceeded";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::OutputCollision: return "OutputCollision";
    case ErrorCode::InvalidTransformation: return "InvalidTransformation";
    case ErrorCode::UnknownTemplate: return "UnknownTemplate";
    case ErrorCode::UnknownPlayer: return "UnknownPlayer";
    case ErrorCode::IllegalCommand: return "IllegalCommand";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace keraia
