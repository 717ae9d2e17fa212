#include "doctest.h"
#include "generators.hpp"
#include "hahn/error.hpp"
#include "hahn/weierstrass.hpp"

using namespace hahn;
using gen::G;

namespace {

MultiSeries P(const std::string& s, std::size_t n) { return parse_multiseries(s, n); }

HahnSeries approx_coeff(const MultiSeries& f, const MultiIndex& m) { return f.coeff(m).approx(); }

// Same monomials and same known parts, ignoring precision bookkeeping.
bool same_approx(const MultiSeries& a, const MultiSeries& b) {
  for (const auto& [m, c] : a.coeffs())
    if (!(c.approx() == approx_coeff(b, m))) return false;
  for (const auto& [m, c] : b.coeffs())
    if (!(c.approx() == approx_coeff(a, m))) return false;
  return true;
}

MultiSeries defect(const MultiSeries& f, const MultiSeries& g, const DivisionResult& d,
                   std::size_t var, unsigned D) {
  MultiSeries r = g - MultiSeries::mul(d.Q, f, D);
  for (std::size_t i = 0; i < d.R.size(); ++i) {
    MultiIndex m(f.nvars(), 0);
    m[var] = static_cast<unsigned>(i);
    r = r - MultiSeries::mul(d.R[i], MultiSeries::monomial(TruncatedSeries::constant(1), m, D), D);
  }
  return r;
}

// Long division by a monic polynomial in x_var.
std::pair<MultiSeries, MultiSeries> euclid(const MultiSeries& f, const MultiSeries& g,
                                           std::size_t var, unsigned s) {
  MultiSeries rem = g, q(g.nvars(), 64);
  rem = rem.with_degree_bound(64);
  while (true) {
    const MultiIndex* lead = nullptr;
    for (const auto& [m, c] : rem.coeffs())
      if (m[var] >= s && (!lead || m[var] > (*lead)[var])) lead = &m;
    if (!lead) break;
    MultiIndex n = *lead;
    n[var] -= s;
    auto term = MultiSeries::monomial(rem.coeff(*lead), n, 64);
    q = q + term;
    rem = rem - MultiSeries::mul(term, f, 64);
  }
  return {q, rem};
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("text format round trip") {
  auto f = P("[1 - 1*t^(1)]*x1^2 + [3/2]*x2", 2);
  CHECK(to_string(f) == "[1 - 1*t^(1)]*x1^2 + [3/2]*x2");
  CHECK(parse_multiseries(to_string(f), 2) == f);
  auto g = P("[2]*x1*x2 + [1] + O(deg 4)", 2);
  CHECK(g.truncated_tail());
  CHECK(g.degree_bound() == 3);
  CHECK(to_string(g) == "[2]*x1*x2 + [1] + O(deg 4)");
  CHECK(to_string(P("0", 3)) == "0");
  CHECK(P("x1^2*x2", 2).coeff({2, 1}).approx() == HahnSeries::constant(1));
  CHECK(kind_of([] { P("[1]*x3", 2); }) == ErrorKind::SyntaxError);
  CHECK(kind_of([] { P("[1 + ]*x1", 2); }) == ErrorKind::SyntaxError);
}

TEST_CASE("gauss_data and regular_degree examples") {
  auto a = gauss_data(P("[1]*x1 + [1*t^(1)]*x2", 2));
  CHECK(a.norm == G(0));
  CHECK(a.top == P("[1]*x1", 2));
  auto b = gauss_data(P("[1*t^(2)] + [1*t^(2)]*x1", 2));
  CHECK(b.norm == G(2));
  CHECK(b.top == P("[1] + [1]*x1", 2));
  auto c = gauss_data(P("[1*t^(-1)]*x1*x2 + [3]*x1", 2));
  CHECK(c.norm == G(-1));
  CHECK(to_string(c.top) == "[1]*x1*x2");

  CHECK(regular_degree(P("[1]*x1^2 + [-1*t^(1)]", 2), 0) == 2);
  CHECK(regular_degree(P("[1] + [-1]*x1", 1), 0) == 0);
  CHECK(kind_of([] { regular_degree(P("[1*t^(1)]*x1 + [1]*x2", 2), 0); }) == ErrorKind::NotRegular);
  CHECK(kind_of([] { regular_degree(P("[1*t^(1)]*x1", 1), 0); }) == ErrorKind::NormNotOne);
}

TEST_CASE("weierstrass_divide examples") {
  {
    auto f = P("[1]*x1^2 + [-1*t^(1)]", 1), g = P("[1]*x1^3", 1);
    auto d = weierstrass_divide(f, g, 0, 6, G(10));
    CHECK(same_approx(d.Q, P("[1]*x1", 1)));
    REQUIRE(d.R.size() == 2);
    CHECK(d.R[0].is_zero());
    CHECK(same_approx(d.R[1], P("[1*t^(1)]", 1)));
    CHECK(defect(f, g, d, 0, 6).in_ideal(6, G(10)));
  }
  {
    auto d = weierstrass_divide(P("[1] + [-1]*x1", 1), P("[1]", 1), 0, 3, G(5));
    CHECK(same_approx(d.Q, P("[1]*x1^3 + [1]*x1^2 + [1]*x1 + [1]", 1)));
    CHECK(d.R.empty());
  }
  {
    auto f = P("[1]*x1 + [1*t^(1)]*x2", 2), g = P("[1]*x1", 2);
    auto d = weierstrass_divide(f, g, 0, 4, G(5));
    CHECK(same_approx(d.Q, P("[1]", 2)));
    CHECK(same_approx(d.R[0], P("[-1*t^(1)]*x2", 2)));
  }
  CHECK(kind_of([] { weierstrass_divide(P("[1*t^(1)]*x1", 1), P("[1]", 1), 0, 3, G(2)); }) ==
        ErrorKind::NonUnitNorm);
  CHECK(kind_of([] { weierstrass_divide(P("[1*t^(1)]*x1 + [1]*x2", 2), P("[1]", 2), 0, 3, G(2)); }) ==
        ErrorKind::NotRegular);
}

TEST_CASE("division identity, norm contract and schedule independence") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t nvars = static_cast<std::size_t>(gen::uniform(rng, 1, 3));
    std::size_t var = static_cast<std::size_t>(gen::uniform(rng, 0, static_cast<int>(nvars) - 1));
    unsigned s = static_cast<unsigned>(gen::uniform(rng, 0, 3));
    unsigned D = static_cast<unsigned>(gen::uniform(rng, std::max(3, static_cast<int>(s)), 6));
    auto f = gen::regular_series(rng, nvars, var, s, D, 3);
    auto g = gen::random_multiseries(rng, nvars, D, 3, ratio(gen::uniform(rng, -2, 2), 2));
    GroupElement prec = G(ratio(gen::uniform(rng, 4, 8), 2));
    CAPTURE(to_string(f));
    CAPTURE(to_string(g));
    REQUIRE(regular_degree(f, var) == s);
    auto d = weierstrass_divide(f, g, var, D, prec);
    CHECK(defect(f, g, d, var, D).in_ideal(D, prec));
    GroupElement gn = gauss_data(g).norm;
    if (!d.Q.is_zero()) CHECK(!(gauss_data(d.Q).norm < gn));
    for (const auto& r : d.R) {
      if (!r.is_zero()) CHECK(!(gauss_data(r).norm < gn));
      for (const auto& [m, c] : r.coeffs()) CHECK(m[var] == 0);
    }
    auto e = weierstrass_divide(f, g, var, D, prec, DivisionSchedule::graded);
    CHECK(e.Q == d.Q);
    CHECK(e.R == d.R);
  }
}

TEST_CASE("division by a monic polynomial agrees with long division") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t nvars = static_cast<std::size_t>(gen::uniform(rng, 1, 2));
    unsigned s = static_cast<unsigned>(gen::uniform(rng, 1, 3));
    MultiSeries f(nvars, 16);
    MultiIndex zs(nvars, 0);
    zs[0] = s;
    f.add_term(zs, TruncatedSeries::constant(1));
    for (unsigned i = 0; i < s; ++i) {
      MultiIndex m(nvars, 0);
      m[0] = i;
      f.add_term(m, TruncatedSeries(gen::series(rng, 1, 1)));
      if (nvars == 2 && gen::uniform(rng, 0, 1)) {
        m[1] = static_cast<unsigned>(gen::uniform(rng, 1, static_cast<int>(s - i)));
        f.add_term(m, TruncatedSeries(gen::series(rng, 0, 1)));
      }
    }
    auto g = gen::random_multiseries(rng, nvars, 5, 3, 0);
    auto [q, r] = euclid(f, g, 0, s);
    auto d = weierstrass_divide(f, g, 0, 16, G(1000));
    CAPTURE(to_string(f));
    CAPTURE(to_string(g));
    CHECK(same_approx(d.Q, q));
    MultiSeries rsum(nvars, 16);
    for (unsigned i = 0; i < s; ++i) {
      MultiIndex m(nvars, 0);
      m[0] = i;
      rsum = rsum + MultiSeries::mul(d.R[i], MultiSeries::monomial(TruncatedSeries::constant(1), m, 16), 16);
    }
    CHECK(same_approx(rsum, r));
  }
}

TEST_CASE("unit_invert") {
  auto v = unit_invert(P("[1] + [1]*x1", 1), 4, G(5));
  CHECK(same_approx(v, P("[1]*x1^4 + [-1]*x1^3 + [1]*x1^2 + [-1]*x1 + [1]", 1)));
  auto U = P("[2 + 1*t^(1)] + [1]*x1", 1);
  auto w = unit_invert(U, 5, G(4));
  auto prod = MultiSeries::mul(U, w, 5) - P("[1]", 1);
  CHECK(prod.in_ideal(5, G(4)));
  // 1/(2+t) to O(t^4)
  CHECK(to_string(w.coeff({0})) == "1/2 - 1/4*t^(1) + 1/8*t^(2) - 1/16*t^(3) + O(t^(4))");
  CHECK(kind_of([] { unit_invert(P("[1]*x1", 1), 3, G(2)); }) == ErrorKind::NotAUnit);
  CHECK(kind_of([] { unit_invert(P("[1*t^(1)] + [1]*x1", 1), 3, G(2)); }) == ErrorKind::NotAUnit);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t nvars = static_cast<std::size_t>(gen::uniform(rng, 1, 3));
    auto U2 = gen::regular_series(rng, nvars, 0, 0, 5, 4);
    auto V = unit_invert(U2, 5, G(3));
    CHECK((MultiSeries::mul(U2, V, 5) - MultiSeries::constant(TruncatedSeries::constant(1), nvars, 0))
              .in_ideal(5, G(3)));
  }
}

TEST_CASE("strong_split") {
  // variables: (eta1, eta2) -> f1 (eta1, eta3), f2 (eta2, eta3), Q (eta1, eta2, eta3)
  auto a = strong_split(P("[1]*x1*x2", 2));
  CHECK(a.f1 == P("[1]*x2", 2).with_degree_bound(2));
  CHECK(a.f2.is_zero());
  CHECK(same_approx(a.Q, P("[1]", 3)));
  auto b = strong_split(P("[1]*x1^2*x2", 2));
  CHECK(same_approx(b.f1, P("[1]*x1*x2", 2)));
  CHECK(b.f2.is_zero());
  CHECK(same_approx(b.Q, P("[1]*x1", 3)));
  auto c = strong_split(P("[1]*x1 + [1]*x2", 2));
  CHECK(same_approx(c.f1, P("[1]*x1", 2)));
  CHECK(same_approx(c.f2, P("[1]", 2)));
  CHECK(c.Q.is_zero());

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t m = static_cast<std::size_t>(gen::uniform(rng, 0, 2));
    auto f = gen::random_multiseries(rng, m + 2, 7, 6, -1);
    auto sp = strong_split(f);
    // embed into (xi, eta1, eta2, eta3)
    std::vector<std::size_t> id(m);
    for (std::size_t i = 0; i < m; ++i) id[i] = i;
    auto map = [&](std::initializer_list<std::size_t> tail) {
      auto v = id;
      v.insert(v.end(), tail);
      return v;
    };
    auto F = f.remap(m + 3, map({m, m + 1}));
    auto F1 = sp.f1.remap(m + 3, map({m, m + 2}));
    auto F2 = sp.f2.remap(m + 3, map({m + 1, m + 2}));
    auto eta2 = MultiSeries::variable(m + 1, m + 3, 1);
    auto rel = MultiSeries::variable(m, m + 3, 2) * eta2 - MultiSeries::variable(m + 2, m + 3, 1);
    auto rhs = F1 + eta2 * F2 + sp.Q * rel;
    CHECK(same_approx(F, rhs));
  }
}

TEST_CASE("recenter_rescale") {
  CHECK(same_approx(recenter_rescale(P("[1]*x1^2", 1), {1}, 1), P("[1]*x1^2 + [2]*x1 + [1]", 1)));
  CHECK(same_approx(recenter_rescale(P("[1]*x1", 1), {0}, Rational(1, 2)), P("[1/2]*x1", 1)));
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = static_cast<std::size_t>(gen::uniform(rng, 1, 3));
    auto f = gen::random_multiseries(rng, n, 5, 5, 0);
    std::vector<Rational> a(n), b(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = ratio(gen::uniform(rng, -3, 3), gen::uniform(rng, 1, 3));
      b[i] = ratio(gen::uniform(rng, -3, 3), gen::uniform(rng, 1, 3));
      a[i].canonicalize();
      b[i].canonicalize();
      ab[i] = a[i] + b[i];
    }
    CHECK(recenter_rescale(recenter_rescale(f, a, 1), b, 1) == recenter_rescale(f, ab, 1));
    Rational r(gen::uniform(rng, 1, 4), gen::uniform(rng, 1, 4));
    r.canonicalize();
    auto g = recenter_rescale(f, std::vector<Rational>(n, Rational(0)), r);
    std::vector<TruncatedSeries> pt(n, TruncatedSeries(HahnSeries::monomial(3, G(1))));
    std::vector<TruncatedSeries> scaled(n, TruncatedSeries(HahnSeries::monomial(3 * r, G(1))));
    CHECK(evaluate(g, pt) == evaluate(f, scaled));
  }
}
