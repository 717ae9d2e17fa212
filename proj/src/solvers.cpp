#include "hahn/solvers.hpp"

#include "hahn/error.hpp"
#include "hahn/weierstrass.hpp"

namespace hahn {

namespace {

constexpr int kMaxNewtonSteps = 64;
constexpr int kMaxRefinements = 16;

}  // namespace

TruncatedSeries hensel_polynomial(const std::vector<TruncatedSeries>& coeffs, const TruncatedSeries& y,
                                  const ExtValue& cap) {
  auto c = [&](const TruncatedSeries& x) { return cap.is_finite() ? x.with_prec(cap) : x; };
  TruncatedSeries sum = c(TruncatedSeries::constant(1, y.rank()) + y);
  TruncatedSeries pw = c(y);
  for (const auto& a : coeffs) {
    pw = c(pw * c(y));
    sum = sum + c(a * pw);
  }
  return sum;
}

HenselTrace hensel_root_traced(const std::vector<TruncatedSeries>& coeffs,
                               const GroupElement& target_prec) {
  const std::size_t rank = target_prec.rank();
  ExtValue input_prec = ExtValue::infinity(rank);
  for (const auto& a : coeffs) {
    if (a.rank() != rank) throw Error(ErrorKind::RankMismatch, "coefficient rank differs from target");
    if (!a.is_exact_zero()) {
      ExtValue lb = a.valuation_lower_bound();
      if (!(lb > ExtValue(GroupElement(rank))))
        throw Error(ErrorKind::NotInfinitesimal, "coefficient " + to_string(a) + " is not infinitesimal");
    }
    input_prec = min(input_prec, a.prec());
  }
  if (input_prec < ExtValue(target_prec))
    throw Error(ErrorKind::PrecisionStall, "coefficients are known only to " + input_prec.to_string() +
                                               ", below the target " + target_prec.to_string());
  const ExtValue cap(target_prec);
  HenselTrace trace{TruncatedSeries::constant(-1, rank), {}};
  TruncatedSeries y = trace.root;
  for (int step = 0; step < kMaxNewtonSteps; ++step) {
    TruncatedSeries r = hensel_polynomial(coeffs, y, cap);
    ExtValue vr = r.approx().is_zero() ? r.prec() : ExtValue(r.approx().valuation());
    trace.residual_valuations.push_back(vr);
    if (!(vr < cap)) {
      bool exact_inputs = true;
      for (const auto& a : coeffs) exact_inputs = exact_inputs && a.is_exact();
      if (exact_inputs && y.is_exact() && hensel_polynomial(coeffs, y).is_exact_zero()) {
        trace.root = y;
      } else {
        trace.root = TruncatedSeries(y.approx(), cap);
      }
      return trace;
    }
    if (trace.residual_valuations.size() >= 2 &&
        !(trace.residual_valuations.back() > trace.residual_valuations[trace.residual_valuations.size() - 2]))
      throw Error(ErrorKind::PrecisionStall, "Newton residual stopped improving at " + vr.to_string());
    // p'(y) = 1 + sum i a_i y^(i-1), a unit since the a_i are infinitesimal
    TruncatedSeries dp = TruncatedSeries::constant(1, rank), pw = TruncatedSeries::constant(1, rank);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      pw = (pw * y).with_prec(cap);
      dp = dp + (coeffs[i] * pw).with_prec(cap).scaled(Rational(static_cast<long>(i) + 2));
    }
    TruncatedSeries step_y = (r * invert(dp.with_prec(cap), target_prec)).with_prec(cap);
    y = TruncatedSeries(y.approx() - step_y.approx());
  }
  throw Error(ErrorKind::PrecisionStall, "Newton iteration did not reach the target");
}

TruncatedSeries hensel_root(const std::vector<TruncatedSeries>& coeffs, const GroupElement& target_prec) {
  return hensel_root_traced(coeffs, target_prec).root;
}

MultiSeries implicit_series(const MultiSeries& f, unsigned D_out, const GroupElement& prec_out) {
  const std::size_t n = f.nvars();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "implicit_series needs variables (x.., y)");
  const std::size_t y = n - 1;
  try {
    if (regular_degree(f, y) != 1) throw Error(ErrorKind::NotRegular, "");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotRegular && e.kind() != ErrorKind::NormNotOne) throw;
    throw Error(ErrorKind::NotRegularDegreeOne, "f must have norm 1 and be regular of degree 1 in y");
  }
  const ExtValue P(prec_out);
  auto Y = MultiSeries::variable(y, n, 1, f.rank());
  // y = Q f + R_0(x): setting y = R_0 makes Q(x, R_0) f(x, R_0) vanish.
  MultiSeries r = weierstrass_divide(f, Y, y, D_out, prec_out).R.at(0);
  const MultiSeries fy = derivative(f, y);
  for (int k = 0; k < kMaxRefinements; ++k) {
    MultiSeries res = substitute(f, y, r, D_out).with_coeff_prec(P);
    if (res.in_ideal(std::min(D_out, r.degree_bound()), P)) break;
    MultiSeries slope = substitute(fy, y, r, D_out).with_coeff_prec(P);
    MultiSeries corr = MultiSeries::mul(res, unit_invert(slope, D_out, prec_out), D_out, P);
    r = (r - corr).with_coeff_prec(P);
  }
  MultiSeries out(n - 1, r.degree_bound(), true, f.rank());
  for (const auto& [m, c] : r.coeffs()) {
    if (c.approx().is_zero() && !(c.prec() < P)) continue;
    out.add_term(MultiIndex(m.begin(), m.end() - 1), c);
  }
  return out;
}

MultiSeries sqrt_shifted(const Rational& eps, unsigned D_out) {
  if (sgn(eps) <= 0) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  // h(x, y) = x + eps^2 - (y + eps)^2 = x - 2 eps y - y^2
  MultiSeries h(2, 2);
  h.add_term({1, 0}, TruncatedSeries::constant(1));
  h.add_term({0, 1}, TruncatedSeries::constant(-2 * eps));
  h.add_term({0, 2}, TruncatedSeries::constant(-1));
  // Rational coefficients: any positive precision is exact.
  MultiSeries r = implicit_series(h, D_out, GroupElement::scalar(1));
  MultiSeries exact(1, D_out, true);
  for (const auto& [m, c] : r.coeffs()) exact.add_term(m, TruncatedSeries(c.approx()));
  return exact;
}

}  // namespace hahn
