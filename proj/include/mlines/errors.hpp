#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlines {

enum class ErrorCode {
  SingularPivot,
  IndexClash,
  MissingCauchyDatum,
  ShapeMismatch,
  PathInconsistency,
  DegeneratePair,
  SkewLines,
  IdenticalLines,
  CollinearTriple,
  LineInPlane,
  DegenerateConfiguration,
  NonGenericPosition,
  CollinearityViolation,
  NormalizationFailure,
  DivisionByZero,
  RankDeficiency,
  DegeneratePolarity,
  UnassignedSite,
  DoubleAssignment,
  OutOfBox,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the kernel. The code is stable, the message
/// carries the site / indices involved.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlines
