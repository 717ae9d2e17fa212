#pragma once

#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hahn/multiseries.hpp"

namespace hahn {

using TaylorRule = std::function<Rational(const MultiIndex&)>;

struct AnalyticFunction {
  std::string name;
  std::size_t nvars = 1;
  TaylorRule taylor;
  Rational radius;           // declared convergence radius (metadata)
  bool norm_bound = false;   // declared sup norm <= 1
  std::string rule;          // builtin id or "table: c0 c1 ..." as given
  std::optional<unsigned> polynomial_degree;  // set for finite tables
};

/// Rules known by id: exp, sin, cos, log1p, geometric. The returned radius
/// is the rule's true radius of convergence (nullopt for entire functions).
struct BuiltinRule {
  TaylorRule taylor;
  std::optional<Rational> convergence_radius;
};
std::optional<BuiltinRule> builtin_rule(const std::string& id);

/// Multi-indices of total degree d in graded order: for each degree, the
/// exponent of x1 descends first (x1^2, x1 x2, x2^2, ...).
std::vector<MultiIndex> graded_indices(std::size_t nvars, unsigned degree);

/// Table rule over the graded enumeration; coefficients past the table are 0.
TaylorRule table_rule(std::size_t nvars, std::vector<Rational> coeffs);

class FunctionRegistry {
 public:
  /// Pre-registers exp, sin, cos and log1p.
  FunctionRegistry();

  const AnalyticFunction& register_function(AnalyticFunction f);
  /// One line of the registration format:
  /// `name <name> vars <n> radius <r> rule <builtin-id | table: c0 c1 ...> [norm1]`.
  const AnalyticFunction& register_line(const std::string& line);
  /// Registers every non-empty, non-# line of a file.
  void load_file(const std::string& path);

  const AnalyticFunction* find(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  const AnalyticFunction& insert(AnalyticFunction f);

  mutable std::mutex mu_;
  std::deque<AnalyticFunction> funcs_;
  std::map<std::string, const AnalyticFunction*> by_name_;
};

/// Sum of taylor(mu) a^mu over all mu, truncated at target_prec. Every a_i
/// must be infinitesimal (v(a_i) > 0) or exactly zero.
TruncatedSeries evaluate_analytic(const AnalyticFunction& f, const std::vector<TruncatedSeries>& a,
                                  const GroupElement& target_prec);

/// Taylor expansion up to total degree D (tail marked unknown unless the
/// function is a polynomial of degree <= D).
MultiSeries taylor_expansion(const AnalyticFunction& f, unsigned D, std::size_t rank = 1);

}  // namespace hahn
