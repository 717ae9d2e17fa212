#pragma once

#include <map>
#include <string>
#include <vector>

#include "hahn/series.hpp"

namespace hahn {

using MultiIndex = std::vector<unsigned>;

unsigned total_degree(const MultiIndex& m);

/// Power series in nvars variables with Hahn-series coefficients, kept up to
/// total degree D. A truncated tail means degrees above D are unknown;
/// otherwise the series is a polynomial and those degrees are zero.
class MultiSeries {
 public:
  using Map = std::map<MultiIndex, TruncatedSeries>;

  explicit MultiSeries(std::size_t nvars = 1, unsigned degree_bound = 0, bool truncated_tail = false,
                       std::size_t rank = 1);

  static MultiSeries constant(const TruncatedSeries& c, std::size_t nvars, unsigned degree_bound);
  static MultiSeries variable(std::size_t i, std::size_t nvars, unsigned degree_bound,
                              std::size_t rank = 1);
  static MultiSeries monomial(const TruncatedSeries& c, const MultiIndex& m, unsigned degree_bound);

  std::size_t nvars() const { return nvars_; }
  std::size_t rank() const { return rank_; }
  unsigned degree_bound() const { return degree_bound_; }
  bool truncated_tail() const { return truncated_; }
  const Map& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// Highest total degree of a stored monomial (0 for the zero series).
  unsigned degree() const;

  TruncatedSeries coeff(const MultiIndex& m) const;
  /// Adds c to the coefficient of m; monomials above the bound are dropped.
  void add_term(const MultiIndex& m, const TruncatedSeries& c);
  void set_truncated_tail(bool t) { truncated_ = t; }

  /// Drops monomials above D (marking the tail truncated if any were dropped).
  MultiSeries with_degree_bound(unsigned D) const;
  /// Coefficients truncated below p.
  MultiSeries with_coeff_prec(const ExtValue& p) const;
  MultiSeries scaled(const TruncatedSeries& c) const;
  MultiSeries shifted(const GroupElement& g) const;
  /// Reinterprets variable i as variable map[i] of a series in new_nvars variables.
  MultiSeries remap(std::size_t new_nvars, const std::vector<std::size_t>& map) const;

  MultiSeries operator-() const;
  friend MultiSeries operator+(const MultiSeries& a, const MultiSeries& b);
  friend MultiSeries operator-(const MultiSeries& a, const MultiSeries& b);
  friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);
  /// Product kept to degree D and coefficient precision below `prec`.
  static MultiSeries mul(const MultiSeries& a, const MultiSeries& b, unsigned D,
                         const ExtValue& prec = ExtValue());
  friend bool operator==(const MultiSeries& a, const MultiSeries& b);

  /// True when every stored coefficient of degree <= D is zero below `prec`
  /// and known to at least `prec`.
  bool in_ideal(unsigned D, const ExtValue& prec) const;

 private:
  std::size_t nvars_;
  std::size_t rank_;
  unsigned degree_bound_;
  bool truncated_;
  Map coeffs_;
};

std::string to_string(const MultiSeries& f);
/// Parses `[series]*x1^2*x2 + [3/2]*x2`, optionally ending in `+ O(deg N)`
/// (unknown terms from total degree N on).
/// Without an explicit bound the degree bound is the polynomial degree.
MultiSeries parse_multiseries(const std::string& text, std::size_t nvars, std::size_t rank = 1);

struct GaussData {
  GroupElement norm;
  MultiSeries top;  // rational coefficients
};
GaussData gauss_data(const MultiSeries& f);

unsigned regular_degree(const MultiSeries& f, std::size_t var);

/// Substitutes ξ_i <- r ξ_i + a_i in every variable.
MultiSeries recenter_rescale(const MultiSeries& f, const std::vector<Rational>& a, const Rational& r);

/// Replaces variable `var` by h (a series in the same variables), keeping
/// degree <= D.
MultiSeries substitute(const MultiSeries& f, std::size_t var, const MultiSeries& h, unsigned D);

/// f at a point with infinitesimal coordinates (or any point if f is a
/// polynomial); coefficients beyond `cap` are dropped.
TruncatedSeries evaluate(const MultiSeries& f, const std::vector<TruncatedSeries>& point,
                         const ExtValue& cap = ExtValue());

/// Formal partial derivative.
MultiSeries derivative(const MultiSeries& f, std::size_t var);

struct StrongSplit {
  MultiSeries f1;  // (ξ, η1, η3)
  MultiSeries f2;  // (ξ, η2, η3)
  MultiSeries Q;   // (ξ, η1, η2, η3)
};
/// f in (ξ_1..ξ_m, η1, η2); f = f1(ξ,η1,η3) + η2 f2(ξ,η2,η3) + Q (η1 η2 - η3).
StrongSplit strong_split(const MultiSeries& f);

}  // namespace hahn
