#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hahn {

enum class ErrorKind {
  RankMismatch,
  ZeroOrUncertainLeadingTerm,
  UndecidableAtPrecision,
  NotInValuationRing,
  NotPositive,
  IrrationalRoot,
  InsufficientPrecision,
  ZeroInverse,
  SingletonBall,
  NormNotOne,
  NotRegular,
  NonUnitNorm,
  NotAUnit,
  DuplicateName,
  MalformedRule,
  NotInfinitesimal,
  PrecisionStall,
  NotRegularDegreeOne,
  UndecidedSign,
  DepthExhausted,
  DomainViolation,
  SyntaxError,
  UnknownFunction,
  ArityMismatch,
  DomainError,
  DivisionByZero,
  BudgetExhausted,
  IterationLimit,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hahn
