#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hahn/qpoly.hpp"
#include "hahn/series.hpp"

namespace hahn {

/// Polynomial in x with series coefficients, ascending in x.
using SeriesPoly = std::vector<TruncatedSeries>;

SeriesPoly poly_derivative(const SeriesPoly& p);
TruncatedSeries poly_eval(const SeriesPoly& p, const TruncatedSeries& x);
/// Term syntax, e.g. "(1)*x^2 + (-1*t^(1))".
std::string poly_to_string(const SeriesPoly& p);
/// Squarefree part for exact rank-1 coefficients; other input is returned
/// with zero leading coefficients removed.
SeriesPoly poly_squarefree_part(const SeriesPoly& p);

/// A real algebraic number: the unique root of `witness` in (lo, hi).
struct IntervalCoeff {
  Rational lo, hi;
  QPoly witness;

  /// Bisects until 0 is outside the interval; UndecidedSign after max_steps.
  int sign(int max_steps = 256) const;
  IntervalCoeff refined(const Rational& width) const;
  Rational representative() const { return simplest_rational(lo, hi); }
  std::string to_string() const;
};

struct BranchTerm {
  GroupElement exp;
  std::variant<Rational, IntervalCoeff> coeff;

  bool is_rational() const { return std::holds_alternative<Rational>(coeff); }
};

enum class Conjugacy { real, complex_pair };

/// One root of a polynomial (or a cluster of roots that agree up to `depth`).
///  * exact: the terms are the whole root, depth is infinite;
///  * truncated real: root - terms has valuation >= depth;
///  * interval: the last term has an irrational coefficient at exponent depth;
///  * complex_pair: the terms are a real prefix and the root differs from it
///    at valuation `depth` by a non-real leading coefficient, a root of
///    `complex_witness`.
struct PuiseuxRoot {
  unsigned ramification = 1;
  std::vector<BranchTerm> terms;
  ExtValue depth;
  Conjugacy tag = Conjugacy::real;
  unsigned multiplicity = 1;
  QPoly complex_witness;

  bool exact() const { return depth.is_infinite(); }
  /// The terms before the first irrational coefficient.
  HahnSeries rational_prefix() const;
  /// An exact point with the same ball structure as the root for points
  /// with rational coefficients.
  HahnSeries center() const;
  nlohmann::ordered_json to_json() const;
};

struct PolygonEdge {
  GroupElement root_valuation;  // minus the slope
  unsigned multiplicity;        // horizontal length
};

/// Lower Newton polygon, edges from low to high degree. Exact zero low
/// coefficients (roots at 0) are skipped.
std::vector<PolygonEdge> newton_polygon(const SeriesPoly& p);

/// Newton-Puiseux expansion of all roots up to `depth`.
std::vector<PuiseuxRoot> puiseux_roots(const SeriesPoly& p, const GroupElement& depth);

}  // namespace hahn
