#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace hahn {

using Rational = mpq_class;
using Integer = mpz_class;

/// Canonical text: "p/q" in lowest terms, or "p" when q = 1.
std::string to_string(const Rational& q);

/// Accepts "p" or "p/q" with an optional leading sign; throws Error(SyntaxError).
Rational parse_rational(std::string_view text);

/// n/d in lowest terms; mpq_class(n, d) alone is not canonical.
inline Rational ratio(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline int sign(const Rational& q) { return sgn(q); }

/// Smallest integer >= q.
Integer ceil(const Rational& q);
Integer floor(const Rational& q);

}  // namespace hahn
