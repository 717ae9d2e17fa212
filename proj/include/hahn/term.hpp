#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hahn/analytic.hpp"
#include "hahn/preparation.hpp"

namespace hahn {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// One-variable term over the series field.
struct Term {
  enum class Kind { Literal, Monomial, Var, Add, Sub, Mul, Div, Neg, Pow, Inv, Apply };

  Kind kind = Kind::Literal;
  Rational literal;      // Literal
  GroupElement exp;      // Monomial t^(exp)
  long power = 0;        // Pow
  std::string function;  // Apply
  std::vector<TermPtr> args;

  bool operator==(const Term& o) const;
};

/// Grammar:
///   sum := prod (('+'|'-') prod)*     prod := unary (('*'|'/') unary)*
///   unary := '-' unary | atom         atom := base ('^' integer)*
///   base := rational | 't^(' exp ')' | 'x' | ident '(' sum (',' sum)* ')' | '(' sum ')'
/// A rational literal is written without spaces ("3/2"); "3 / 2" is a division.
/// Throws SyntaxError (with line and column), UnknownFunction, ArityMismatch.
TermPtr parse_term(const std::string& text, const FunctionRegistry& registry, std::size_t rank = 1);

/// Canonical text; parse_term(print_term(t)) == t.
std::string print_term(const Term& t);

struct EvalOptions {
  bool inv_zero_is_zero = false;
};

/// Value at x with precision target (or exact). DomainError for analytic
/// arguments that are not infinitesimal, DivisionByZero for an exact zero
/// denominator unless inv_zero_is_zero is set.
TruncatedSeries eval_term(const Term& t, const TruncatedSeries& x, const GroupElement& target,
                          const FunctionRegistry& registry, const EvalOptions& opt = {});

Evaluable term_evaluable(TermPtr t, const FunctionRegistry& registry, const EvalOptions& opt = {});

/// The term as a polynomial in x, if it is one.
std::optional<SeriesPoly> as_polynomial(const Term& t, std::size_t rank = 1);

struct PrepareTermOptions {
  std::uint64_t trials = 500;
  std::uint64_t seed = 0;
  int budget = 3;  // deepening rounds after the first attempt
  SamplerOptions sampler;
  EvalOptions eval;
};

struct PreparedTerm {
  PreparingSet set;
  VerificationReport report;
};

/// Raised by prepare_term; carries the last failing report.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(const std::string& what, VerificationReport report)
      : Error(ErrorKind::BudgetExhausted, what), report_(std::move(report)) {}
  const VerificationReport& report() const { return report_; }

 private:
  VerificationReport report_;
};

/// Candidate centres from the numerators and denominators of the maximal
/// rational subterms (analytic arguments included) plus 0, checked with
/// verify_preparation and expanded deeper on failure.
PreparedTerm prepare_term(const TermPtr& t, const GroupElement& lambda, const FunctionRegistry& registry,
                          const PrepareTermOptions& opt = {});

}  // namespace hahn
