#pragma once

#include <vector>

#include "hahn/multiseries.hpp"

namespace hahn {

struct HenselTrace {
  TruncatedSeries root;
  /// v(p(y_k)) before each Newton step, ending with the final residual.
  std::vector<ExtValue> residual_valuations;
};

/// Root with standard part -1 of p(y) = 1 + y + a_2 y^2 + ... + a_d y^d,
/// where coeffs = (a_2, ..., a_d) are infinitesimal.
TruncatedSeries hensel_root(const std::vector<TruncatedSeries>& coeffs, const GroupElement& target_prec);
HenselTrace hensel_root_traced(const std::vector<TruncatedSeries>& coeffs,
                               const GroupElement& target_prec);

/// p(y) for p = 1 + y + sum a_i y^i.
TruncatedSeries hensel_polynomial(const std::vector<TruncatedSeries>& coeffs, const TruncatedSeries& y,
                                  const ExtValue& cap = ExtValue());

/// r(x) with f(x, r(x)) = 0 modulo the truncation ideal; the last variable
/// of f is y. The result is a series in the remaining variables.
MultiSeries implicit_series(const MultiSeries& f, unsigned D_out, const GroupElement& prec_out);

/// r with (r + eps)^2 = x + eps^2, i.e. sqrt(x + eps^2) - eps.
MultiSeries sqrt_shifted(const Rational& eps, unsigned D_out);

}  // namespace hahn
