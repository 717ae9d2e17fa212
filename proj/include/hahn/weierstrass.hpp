#pragma once

#include <vector>

#include "hahn/multiseries.hpp"

namespace hahn {

struct DivisionResult {
  MultiSeries Q;
  std::vector<MultiSeries> R;  // R[i] multiplies x_var^i and does not involve x_var
};

/// Order in which the fixed-point iteration consumes the dividend: all at
/// once, or one homogeneous degree slice at a time.
enum class DivisionSchedule { batch, graded };

/// g = Q f + sum_i R_i x_var^i modulo (degree > D_out) + (valuation >= prec_out).
DivisionResult weierstrass_divide(const MultiSeries& f, const MultiSeries& g, std::size_t var,
                                  unsigned D_out, const GroupElement& prec_out,
                                  DivisionSchedule schedule = DivisionSchedule::batch);

/// V with U V = 1 modulo the truncation ideal.
MultiSeries unit_invert(const MultiSeries& U, unsigned D_out, const GroupElement& prec_out);

}  // namespace hahn
