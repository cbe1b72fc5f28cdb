#include "mlines/errors.hpp"

namespace mlines {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularPivot: return "SingularPivot";
    case ErrorCode::IndexClash: return "IndexClash";
    case ErrorCode::MissingCauchyDatum: return "MissingCauchyDatum";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::PathInconsistency: return "PathInconsistency";
    case ErrorCode::DegeneratePair: return "DegeneratePair";
    case ErrorCode::SkewLines: return "SkewLines";
    case ErrorCode::IdenticalLines: return "IdenticalLines";
    case ErrorCode::CollinearTriple: return "CollinearTriple";
    case ErrorCode::LineInPlane: return "LineInPlane";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::NonGenericPosition: return "NonGenericPosition";
    case ErrorCode::CollinearityViolation: return "CollinearityViolation";
    case ErrorCode::NormalizationFailure: return "NormalizationFailure";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::RankDeficiency: return "RankDeficiency";
    case ErrorCode::DegeneratePolarity: return "DegeneratePolarity";
    case ErrorCode::UnassignedSite: return "UnassignedSite";
    case ErrorCode::DoubleAssignment: return "DoubleAssignment";
    case ErrorCode::OutOfBox: return "OutOfBox";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace mlines
