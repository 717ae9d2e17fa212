#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hahn/rational.hpp"

namespace hahn {

/// Dense univariate polynomial over Q, ascending coefficients.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<Rational> coeffs);
  static QPoly constant(const Rational& c) { return QPoly({c}); }
  static QPoly monomial(const Rational& c, unsigned k);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(unsigned k) const { return k < c_.size() ? c_[k] : Rational(0); }
  const Rational& leading() const { return c_.back(); }

  Rational eval(const Rational& z) const;
  int sign_at(const Rational& z) const { return sgn(eval(z)); }
  QPoly derivative() const;
  QPoly scaled(const Rational& q) const;
  QPoly monic() const;
  /// Integer coefficients with content 1 and positive leading coefficient.
  QPoly integer_normalized() const;

  friend QPoly operator+(const QPoly& a, const QPoly& b);
  friend QPoly operator-(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const QPoly& a, const QPoly& b);
  friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

  std::string to_string(const std::string& var = "z") const;

 private:
  void trim();
  std::vector<Rational> c_;
};

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
/// Monic gcd (zero if both are zero).
QPoly gcd(const QPoly& a, const QPoly& b);
QPoly squarefree_part(const QPoly& p);
/// p = c * prod_k f_k^k with squarefree, pairwise coprime f_k (Yun).
std::vector<std::pair<QPoly, unsigned>> squarefree_decomposition(const QPoly& p);

/// A real root of a squarefree polynomial: exactly `lo` when exact, else the
/// unique root in the open interval (lo, hi).
struct RealRoot {
  Rational lo, hi;
  bool exact = false;
};

/// Real roots of a squarefree polynomial in increasing order; rational
/// roots are detected and returned exactly.
std::vector<RealRoot> real_roots(const QPoly& squarefree);
/// Bisects an inexact root interval until hi - lo <= width.
RealRoot refine_root(const QPoly& squarefree, RealRoot r, const Rational& width);
/// Rational with the smallest denominator strictly between lo < hi.
Rational simplest_rational(const Rational& lo, const Rational& hi);

/// Polynomials in x over Q[s], ascending in x.
using BiPoly = std::vector<QPoly>;
/// Squarefree part in Q(s)[x], scaled to be primitive over Q[s].
BiPoly bi_squarefree_part(const BiPoly& p);

}  // namespace hahn
