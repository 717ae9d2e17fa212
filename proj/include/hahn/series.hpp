#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hahn/group.hpp"
#include "hahn/rational.hpp"

namespace hahn {

struct SeriesTerm {
  GroupElement exp;
  Rational coeff;
};

/// A finite-support generalized power series sum c_g t^g with rational
/// coefficients and exponents in Q^d. Terms are kept strictly ascending with no
/// zero coefficients; the empty list is zero.
class HahnSeries {
 public:
  explicit HahnSeries(std::size_t rank = 1) : rank_(rank) {}

  /// Sorts, merges equal exponents and drops zeros.
  static HahnSeries from_terms(std::vector<SeriesTerm> terms, std::size_t rank);
  static HahnSeries constant(const Rational& c, std::size_t rank = 1);
  static HahnSeries monomial(const Rational& c, const GroupElement& exp);

  std::size_t rank() const { return rank_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::vector<SeriesTerm>& terms() const { return terms_; }

  /// Minimal exponent; the series must be nonzero.
  const GroupElement& valuation() const;
  const Rational& leading_coeff() const;
  const GroupElement& max_exponent() const;
  Rational coeff_at(const GroupElement& e) const;

  /// Keep exponents < bound (or <= bound for `truncated_at_most`).
  HahnSeries truncated_below(const ExtValue& bound) const;
  HahnSeries truncated_at_most(const GroupElement& bound) const;

  /// Multiply by t^g.
  HahnSeries shifted(const GroupElement& g) const;
  HahnSeries scaled(const Rational& c) const;

  HahnSeries operator-() const;
  friend HahnSeries operator+(const HahnSeries& a, const HahnSeries& b);
  friend HahnSeries operator-(const HahnSeries& a, const HahnSeries& b);
  friend HahnSeries operator*(const HahnSeries& a, const HahnSeries& b);
  friend bool operator==(const HahnSeries& a, const HahnSeries& b);

  /// Product keeping only exponents strictly below `bound`.
  static HahnSeries mul_below(const HahnSeries& a, const HahnSeries& b, const ExtValue& bound);

 private:
  std::size_t rank_;
  std::vector<SeriesTerm> terms_;
};

enum class Sign { negative = -1, zero = 0, positive = 1 };

/// A series known up to precision: the represented value x satisfies
/// v(x - approx) >= prec, and every exponent of approx lies below prec.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::size_t rank = 1)
      : approx_(rank), prec_(ExtValue::infinity(rank)) {}
  TruncatedSeries(HahnSeries exact);  // NOLINT: exact values convert implicitly
  TruncatedSeries(HahnSeries approx, ExtValue prec);

  static TruncatedSeries constant(const Rational& c, std::size_t rank = 1) {
    return TruncatedSeries(HahnSeries::constant(c, rank));
  }
  static TruncatedSeries monomial(const Rational& c, const GroupElement& e) {
    return TruncatedSeries(HahnSeries::monomial(c, e));
  }

  std::size_t rank() const { return approx_.rank(); }
  const HahnSeries& approx() const { return approx_; }
  const ExtValue& prec() const { return prec_; }
  bool is_exact() const { return prec_.is_infinite(); }
  bool is_exact_zero() const { return is_exact() && approx_.is_zero(); }
  /// The leading term is certain: exact zero, or approx nonzero.
  bool leading_determined() const { return is_exact() || !approx_.is_zero(); }

  /// min(v(approx), prec): a guaranteed lower bound on the valuation.
  ExtValue valuation_lower_bound() const;

  /// Lower the precision to min(prec, p).
  TruncatedSeries with_prec(const ExtValue& p) const;

  TruncatedSeries operator-() const;
  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
  /// Identical approximation and identical precision.
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b);

  TruncatedSeries scaled(const Rational& c) const;
  TruncatedSeries shifted(const GroupElement& g) const;

 private:
  HahnSeries approx_;
  ExtValue prec_;
};

enum class FieldOpKind { add, sub, mul };

TruncatedSeries field_op(FieldOpKind kind, const TruncatedSeries& a, const TruncatedSeries& b);

/// x with precision min(target_prec, prec_a - 2 v(a)), computed by inverting
/// the leading monomial and summing the geometric series of the unit part.
TruncatedSeries invert(const TruncatedSeries& a, const GroupElement& target_prec);

Sign compare_sign(const TruncatedSeries& a);
ExtValue valuation(const TruncatedSeries& a);
Rational standard_part(const TruncatedSeries& a);

/// Positive n-th root x of a positive a with v(x^n - a) >= target_prec
/// (as far as a's own precision allows). The leading coefficient of a must be
/// the n-th power of a rational; otherwise Error(IrrationalRoot).
TruncatedSeries nth_root(const TruncatedSeries& a, unsigned n, const GroupElement& target_prec);

/// a^k for k >= 0 by repeated squaring, every intermediate capped at `cap`.
TruncatedSeries power(const TruncatedSeries& a, unsigned k, const ExtValue& cap = ExtValue());

/// Exact rational n-th root of q if one exists.
bool rational_nth_root(const Rational& q, unsigned n, Rational& out);

// Text format: "3/2*t^(-1/2) + 1 - 5*t^(2)", trailing " + O(t^(p))" when inexact.
std::string to_string(const HahnSeries& s);
std::string to_string(const TruncatedSeries& s);
TruncatedSeries parse_series(const std::string& text, std::size_t rank = 1);

}  // namespace hahn
