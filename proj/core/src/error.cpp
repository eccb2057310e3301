#include "maxstab/error.hpp"

namespace maxstab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NotConditionallyNegativeDefinite: return "NotConditionallyNegativeDefinite";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::MissingBlockValue: return "MissingBlockValue";
    case ErrorCode::NonFiniteBlockValue: return "NonFiniteBlockValue";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::MaxSubdivisions: return "MaxSubdivisions";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::CdfNotConverged: return "CdfNotConverged";
    case ErrorCode::NegativeDensityTerm: return "NegativeDensityTerm";
    case ErrorCode::NotOnFace: return "NotOnFace";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::NotIdentifiable: return "NotIdentifiable";
    case ErrorCode::NonPositivePartitionSum: return "NonPositivePartitionSum";
    case ErrorCode::LikelihoodUnderflow: return "LikelihoodUnderflow";
    case ErrorCode::UnsupportedMethod: return "UnsupportedMethod";
    case ErrorCode::NoImprovement: return "NoImprovement";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::IterationGuard: return "IterationGuard";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace maxstab
