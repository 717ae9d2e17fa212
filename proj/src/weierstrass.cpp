#include "hahn/weierstrass.hpp"

#include "hahn/error.hpp"

namespace hahn {

namespace {

constexpr int kMaxDivisionIterations = 4096;

// Drops coefficients that vanish modulo t^P.
MultiSeries clean(const MultiSeries& f, const ExtValue& P) {
  MultiSeries out(f.nvars(), f.degree_bound(), f.truncated_tail(), f.rank());
  for (const auto& [m, c] : f.coeffs()) {
    auto t = c.with_prec(P);
    if (t.approx().is_zero() && !(t.prec() < P)) continue;
    out.add_term(m, t);
  }
  return out;
}

MultiSeries truncated_copy(const MultiSeries& f, unsigned D, const ExtValue& P) {
  auto out = clean(f.with_degree_bound(D), P);
  out.set_truncated_tail(true);
  return out;
}

// Inverse of a series whose constant coefficient has valuation 0 and which
// is congruent to that constant modulo monomials or positive valuation.
MultiSeries inverse_unit_part(const MultiSeries& U, unsigned D, const ExtValue& P) {
  const MultiIndex zero(U.nvars(), 0);
  TruncatedSeries c0 = U.coeff(zero);
  if (c0.approx().is_zero() || !c0.approx().valuation().is_zero())
    throw Error(ErrorKind::NotAUnit, "constant coefficient is not a unit of the valuation ring");
  GroupElement target = P.is_finite() ? P.value() : throw Error(ErrorKind::InvalidArgument,
                                                                "division needs a finite precision");
  TruncatedSeries c0inv = invert(c0, target);
  MultiSeries one = MultiSeries::constant(TruncatedSeries::constant(1, U.rank()), U.nvars(), D);
  MultiSeries minus_u = clean(one - MultiSeries::mul(U, MultiSeries::constant(c0inv, U.nvars(), D), D, P), P);
  MultiSeries sum = one, term = one;
  for (int k = 0; k < kMaxDivisionIterations; ++k) {
    term = clean(MultiSeries::mul(term, minus_u, D, P), P);
    if (term.is_zero()) return truncated_copy(MultiSeries::mul(sum, MultiSeries::constant(c0inv, U.nvars(), D), D, P), D, P);
    sum = sum + term;
  }
  throw Error(ErrorKind::IterationLimit, "unit inverse did not converge (lex rank > 1?)");
}

struct Pieces {
  MultiSeries qprime, rem;
};

Pieces run_iteration(const MultiSeries& start, const MultiSeries& w, std::size_t var, unsigned s,
                     unsigned D, const ExtValue& P) {
  Pieces acc{MultiSeries(start.nvars(), D, true, start.rank()),
             MultiSeries(start.nvars(), D, true, start.rank())};
  MultiSeries current = clean(start, P);
  for (int k = 0; k < kMaxDivisionIterations; ++k) {
    if (current.is_zero()) return acc;
    MultiSeries q(start.nvars(), D, true, start.rank());
    for (const auto& [m, c] : current.coeffs()) {
      if (m[var] >= s) {
        MultiIndex n = m;
        n[var] -= s;
        q.add_term(n, c);
      } else {
        acc.rem.add_term(m, c);
      }
    }
    acc.qprime = acc.qprime + q;
    current = clean(MultiSeries::mul(q, w, D, P), P);
  }
  throw Error(ErrorKind::IterationLimit, "division iteration did not reach the truncation ideal");
}

}  // namespace

DivisionResult weierstrass_divide(const MultiSeries& f, const MultiSeries& g, std::size_t var,
                                  unsigned D_out, const GroupElement& prec_out,
                                  DivisionSchedule schedule) {
  if (f.nvars() != g.nvars())
    throw Error(ErrorKind::InvalidArgument, "divisor and dividend have different variables");
  if (f.rank() != g.rank()) throw Error(ErrorKind::RankMismatch, "coefficient ranks differ");
  if (f.is_zero()) throw Error(ErrorKind::NonUnitNorm, "divisor is zero");
  if (!gauss_data(f).norm.is_zero()) throw Error(ErrorKind::NonUnitNorm, "divisor norm is not 1");
  const unsigned s = regular_degree(f, var);

  unsigned D = D_out;
  if (f.truncated_tail()) D = std::min(D, f.degree_bound());
  if (g.truncated_tail()) D = std::min(D, g.degree_bound());

  DivisionResult out{MultiSeries(f.nvars(), D, true, f.rank()), {}};
  for (unsigned i = 0; i < s; ++i) out.R.emplace_back(f.nvars(), D, true, f.rank());
  MultiSeries gD = g.with_degree_bound(D);
  if (gD.is_zero()) return out;

  // Work with the norm-zero multiple of g; the ideal moves accordingly.
  const GroupElement nu = gauss_data(gD).norm;
  const ExtValue P(prec_out - nu);
  if (P.value().sign() <= 0) return out;
  MultiSeries g0 = gD.shifted(-nu);

  MultiSeries f_low(f.nvars(), D, true, f.rank()), f_high(f.nvars(), D, true, f.rank());
  const MultiSeries fD = f.with_degree_bound(D);
  for (const auto& [m, c] : fD.coeffs()) {
    if (m[var] < s) {
      f_low.add_term(m, c);
    } else {
      MultiIndex n = m;
      n[var] -= s;
      f_high.add_term(n, c);
    }
  }
  MultiSeries E = inverse_unit_part(f_high, D, P);
  MultiSeries w = clean(-MultiSeries::mul(f_low, E, D, P), P);

  Pieces total{MultiSeries(f.nvars(), D, true, f.rank()), MultiSeries(f.nvars(), D, true, f.rank())};
  if (schedule == DivisionSchedule::batch) {
    total = run_iteration(g0, w, var, s, D, P);
  } else {
    for (unsigned d = 0; d <= D; ++d) {
      MultiSeries slice(f.nvars(), D, true, f.rank());
      for (const auto& [m, c] : g0.coeffs())
        if (total_degree(m) == d) slice.add_term(m, c);
      if (slice.is_zero()) continue;
      Pieces p = run_iteration(slice, w, var, s, D, P);
      total.qprime = total.qprime + p.qprime;
      total.rem = total.rem + p.rem;
    }
  }

  out.Q = truncated_copy(MultiSeries::mul(total.qprime, E, D, P), D, P).shifted(nu);
  for (const auto& [m, c] : total.rem.coeffs()) {
    MultiIndex n = m;
    n[var] = 0;
    out.R[m[var]].add_term(n, c.shifted(nu));
  }
  return out;
}

MultiSeries unit_invert(const MultiSeries& U, unsigned D_out, const GroupElement& prec_out) {
  if (U.is_zero()) throw Error(ErrorKind::NotAUnit, "zero is not a unit");
  auto gd = gauss_data(U);
  const MultiIndex zero(U.nvars(), 0);
  if (!gd.norm.is_zero() || gd.top.coeff(zero).is_exact_zero())
    throw Error(ErrorKind::NotAUnit, "needs norm 1 and a nonzero constant term in the top slice");
  MultiSeries one = MultiSeries::constant(TruncatedSeries::constant(1, U.rank()), U.nvars(), 0);
  return weierstrass_divide(U, one, 0, D_out, prec_out).Q;
}

}  // namespace hahn
