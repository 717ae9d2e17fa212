#pragma once

// Seeded random instances shared by the unit and acceptance tests.

#include <random>

#include "hahn/multiseries.hpp"
#include "hahn/puiseux.hpp"

namespace gen {

using namespace hahn;

inline GroupElement G(const Rational& q) { return GroupElement::scalar(q); }

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Rational nonzero_small(std::mt19937_64& rng) {
  int v = uniform(rng, 1, 5);
  return uniform(rng, 0, 1) ? Rational(v) : Rational(-v);
}

/// Up to `terms` terms with exponents in min_exp + {0, 1/2, 1, 3/2, 2}.
inline HahnSeries series(std::mt19937_64& rng, const Rational& min_exp, int terms = 2) {
  std::vector<SeriesTerm> t;
  for (int i = 0, n = uniform(rng, 1, terms); i < n; ++i)
    t.push_back({G(min_exp + Rational(uniform(rng, 0, 4), 2)), nonzero_small(rng)});
  auto s = HahnSeries::from_terms(std::move(t), 1);
  return s.is_zero() ? HahnSeries::monomial(1, G(min_exp)) : s;
}

inline MultiIndex random_index(std::mt19937_64& rng, std::size_t nvars, unsigned max_deg) {
  MultiIndex m(nvars, 0);
  unsigned d = static_cast<unsigned>(uniform(rng, 0, static_cast<int>(max_deg)));
  for (unsigned k = 0; k < d; ++k) ++m[uniform(rng, 0, static_cast<int>(nvars) - 1)];
  return m;
}

/// f with Gauss norm 0 and regular of degree s in `var`: c z^s plus lower
/// terms that are either of positive valuation or involve other variables.
inline MultiSeries regular_series(std::mt19937_64& rng, std::size_t nvars, std::size_t var,
                                  unsigned s, unsigned D, int extra_terms = 4) {
  MultiSeries f(nvars, D);
  MultiIndex zs(nvars, 0);
  zs[var] = s;
  f.add_term(zs, TruncatedSeries(HahnSeries::constant(nonzero_small(rng)) +
                                 (uniform(rng, 0, 1) ? series(rng, 1, 1) : HahnSeries())));
  for (int i = 0; i < extra_terms; ++i) {
    MultiIndex m = random_index(rng, nvars, D);
    bool axis = true;
    for (std::size_t j = 0; j < nvars; ++j)
      if (j != var && m[j] != 0) axis = false;
    bool below = axis && m[var] < s;
    Rational min_exp = below || uniform(rng, 0, 1) ? Rational(1, 2) : Rational(0);
    if (m == zs) continue;
    f.add_term(m, TruncatedSeries(series(rng, min_exp)));
  }
  return f;
}

inline MultiSeries random_multiseries(std::mt19937_64& rng, std::size_t nvars, unsigned D,
                                      int terms, const Rational& min_exp) {
  MultiSeries g(nvars, D);
  for (int i = 0; i < terms; ++i)
    g.add_term(random_index(rng, nvars, D), TruncatedSeries(series(rng, min_exp)));
  return g;
}

/// lc * prod (x - r) for the given roots.
inline SeriesPoly poly_from_roots(const HahnSeries& lc, const std::vector<HahnSeries>& roots) {
  SeriesPoly p{TruncatedSeries(lc)};
  for (const auto& r : roots) {
    SeriesPoly q(p.size() + 1, TruncatedSeries(HahnSeries(1)));
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i + 1] = q[i + 1] + p[i];
      q[i] = q[i] - p[i] * TruncatedSeries(r);
    }
    p = std::move(q);
  }
  return p;
}

inline SeriesPoly poly_mul(const SeriesPoly& a, const SeriesPoly& b) {
  SeriesPoly out(a.size() + b.size() - 1, TruncatedSeries(HahnSeries(1)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  return out;
}

}  // namespace gen
