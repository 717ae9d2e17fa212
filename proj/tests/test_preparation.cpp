#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "generators.hpp"
#include "hahn/error.hpp"
#include "hahn/preparation.hpp"
#include "hahn/solvers.hpp"

using namespace hahn;
using gen::G;

namespace {

HahnSeries H(const std::string& s) { return parse_series(s).approx(); }
TruncatedSeries S(const std::string& s) { return parse_series(s); }
QPoly Z(std::vector<Rational> c) { return QPoly(std::move(c)); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

std::set<std::string> as_strings(const std::vector<HahnSeries>& v) {
  std::set<std::string> out;
  for (const auto& s : v) out.insert(to_string(s));
  return out;
}

Rational rand_q(std::mt19937_64& rng, int span, int den) {
  return ratio(gen::uniform(rng, -span, span), gen::uniform(rng, 1, den));
}

// Distinct random roots with exponents in (1/2)Z within [-1, 3].
std::vector<HahnSeries> random_roots(std::mt19937_64& rng, int n) {
  std::vector<HahnSeries> roots;
  while (static_cast<int>(roots.size()) < n) {
    HahnSeries r = gen::uniform(rng, 0, 4) == 0 ? HahnSeries(1) : gen::series(rng, ratio(gen::uniform(rng, -2, 2), 2), 3);
    if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
  }
  return roots;
}

unsigned total_multiplicity(const std::vector<PuiseuxRoot>& roots) {
  unsigned n = 0;
  for (const auto& r : roots) n += r.multiplicity;
  return n;
}

}  // namespace

TEST_CASE("polynomials over Q") {
  QPoly a = Z({-1, 0, 1}), b = Z({1, 1});
  auto [q, r] = divmod(a, b);
  CHECK(q == Z({-1, 1}));
  CHECK(r.is_zero());
  CHECK(gcd(Z({-1, 0, 1}), Z({1, 2, 1})) == Z({1, 1}));
  CHECK(a.to_string() == "z^2 - 1");
  CHECK(Z({Rational(1, 2), 0, Rational(-3, 4)}).integer_normalized() == Z({-2, 0, 3}));

  // (z - 1)^2 (z + 2)
  auto dec = squarefree_decomposition(Z({2, -3, 0, 1}));
  REQUIRE(dec.size() == 2);
  CHECK(dec[0] == std::make_pair(Z({2, 1}), 1u));
  CHECK(dec[1] == std::make_pair(Z({-1, 1}), 2u));
  CHECK(squarefree_part(Z({2, -3, 0, 1})) == Z({-2, 1, 1}));
}

TEST_CASE("simplest rational in an interval") {
  CHECK(simplest_rational(Rational(1, 3), Rational(1, 2)) == Rational(2, 5));
  CHECK(simplest_rational(0, 1) == Rational(1, 2));
  CHECK(simplest_rational(Rational(-1, 2), Rational(1, 2)) == 0);
  CHECK(simplest_rational(Rational(-7, 3), Rational(-2)) == Rational(-9, 4));
  CHECK(simplest_rational(Rational(3, 7), Rational(4, 7)) == Rational(1, 2));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    Rational lo = rand_q(rng, 20, 12), hi = rand_q(rng, 20, 12);
    lo.canonicalize();
    hi.canonicalize();
    if (lo == hi) continue;
    if (hi < lo) std::swap(lo, hi);
    Rational s = simplest_rational(lo, hi);
    CHECK(lo < s);
    CHECK(s < hi);
    // Brute force: the first denominator admitting a rational strictly inside.
    for (long q = 1;; ++q) {
      Integer p = floor(lo * Rational(q)) + 1;
      if (Rational(p) / q < hi) {
        CHECK(s.get_den() == q);
        break;
      }
    }
  }
}

TEST_CASE("real roots of squarefree polynomials") {
  auto r2 = real_roots(Z({-2, 0, 1}));
  REQUIRE(r2.size() == 2);
  for (const auto& r : r2) {
    CHECK_FALSE(r.exact);
    CHECK(Z({-2, 0, 1}).sign_at(r.lo) * Z({-2, 0, 1}).sign_at(r.hi) < 0);
  }
  CHECK(r2[0].hi < r2[1].lo);

  auto r3 = real_roots(Z({0, -1, 0, 1}));
  REQUIRE(r3.size() == 3);
  CHECK(r3[0].exact);
  CHECK(r3[0].lo == -1);
  CHECK(r3[1].lo == 0);
  CHECK(r3[2].lo == 1);

  CHECK(real_roots(Z({1, 0, 1})).empty());

  // Random products of rational linear factors and an optional quadratic.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    std::set<Rational> want;
    QPoly p = QPoly::constant(rand_q(rng, 5, 1) + 6);
    for (int k = 0, n = gen::uniform(rng, 1, 4); k < n; ++k) {
      Rational r = rand_q(rng, 9, 7);
      r.canonicalize();
      if (want.insert(r).second) p = p * Z({-r, 1});
    }
    int quad = gen::uniform(rng, 0, 2);
    if (quad == 1) p = p * Z({-3, 0, 1});
    if (quad == 2) p = p * Z({1, 0, 1});
    auto roots = real_roots(p);
    std::set<Rational> got;
    int inexact = 0;
    for (const auto& r : roots) {
      if (r.exact) got.insert(r.lo);
      else ++inexact;
    }
    CHECK(got == want);
    CHECK(inexact == (quad == 1 ? 2 : 0));
  }
}

TEST_CASE("refining an algebraic coefficient") {
  IntervalCoeff c{1, 2, Z({-2, 0, 1})};
  auto f = c.refined(Rational(1, 1000));
  CHECK(f.hi - f.lo <= Rational(1, 1000));
  CHECK(f.lo * f.lo < 2);
  CHECK(f.hi * f.hi > 2);
  CHECK(c.sign() == 1);
  CHECK(IntervalCoeff{-2, 1, Z({-2, 0, 1})}.sign() == -1);
  CHECK(c.to_string() == "root of z^2 - 2 in (1, 2)");
}

TEST_CASE("squarefree part over the series field") {
  // (x^2 - t)^2 (x + 1)
  SeriesPoly a = gen::poly_from_roots(H("1"), {H("-1")});
  SeriesPoly q{S("-1*t^(1)"), S("0"), S("1")};
  SeriesPoly p = gen::poly_mul(gen::poly_mul(q, q), a);
  SeriesPoly sq = poly_squarefree_part(p);
  REQUIRE(sq.size() == 4);
  // Up to a scalar it is (x^2 - t)(x + 1).
  SeriesPoly want = gen::poly_mul(q, a);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(sq[i] * want[3] == want[i] * sq[3]);

  SeriesPoly already{S("1"), S("t^(1/3)"), S("1")};
  CHECK(poly_squarefree_part(already).size() == 3);
}

TEST_CASE("newton polygon") {
  auto e1 = newton_polygon({S("-1*t^(1)"), S("0"), S("1")});
  REQUIRE(e1.size() == 1);
  CHECK(e1[0].root_valuation == G(Rational(1, 2)));
  CHECK(e1[0].multiplicity == 2);

  auto e2 = newton_polygon({S("1"), S("1"), S("t^(1)")});
  REQUIRE(e2.size() == 2);
  CHECK(e2[0].root_valuation == G(0));
  CHECK(e2[0].multiplicity == 1);
  CHECK(e2[1].root_valuation == G(-1));
  CHECK(e2[1].multiplicity == 1);

  // Roots at 0 are skipped.
  auto e3 = newton_polygon({S("0"), S("t^(2)"), S("1")});
  REQUIRE(e3.size() == 1);
  CHECK(e3[0].root_valuation == G(2));

  CHECK(kind_of([] { newton_polygon({S("O(t^(1))"), S("1"), S("1")}); }) == ErrorKind::InsufficientPrecision);
  // An imprecise middle coefficient is fine when it lies above the hull.
  CHECK(newton_polygon({S("t^(2)"), S("O(t^(5))"), S("1")}).size() == 1);
  CHECK(kind_of([] { newton_polygon({S("t^(2)"), S("O(t^(1/2))"), S("1")}); }) ==
        ErrorKind::InsufficientPrecision);
}

TEST_CASE("puiseux branches: examples") {
  auto r1 = puiseux_roots({S("-1*t^(1)"), S("0"), S("1")}, G(6));
  REQUIRE(r1.size() == 2);
  std::vector<HahnSeries> c1;
  for (const auto& r : r1) {
    CHECK(r.exact());
    CHECK(r.ramification == 2);
    c1.push_back(r.center());
  }
  CHECK(as_strings(c1) == std::set<std::string>{"1*t^(1/2)", "-1*t^(1/2)"});

  auto r2 = puiseux_roots({S("-2*t^(1)"), S("0"), S("1")}, G(6));
  REQUIRE(r2.size() == 2);
  int signs = 0;
  for (const auto& r : r2) {
    CHECK(r.tag == Conjugacy::real);
    CHECK(r.ramification == 2);
    CHECK(r.depth == ExtValue(G(Rational(1, 2))));
    REQUIRE(r.terms.size() == 1);
    const auto& ic = std::get<IntervalCoeff>(r.terms[0].coeff);
    CHECK(ic.witness == Z({-2, 0, 1}));
    signs += ic.sign();
  }
  CHECK(signs == 0);

  auto r3 = puiseux_roots({S("t^(1)"), S("0"), S("1")}, G(6));
  REQUIRE(r3.size() == 1);
  CHECK(r3[0].tag == Conjugacy::complex_pair);
  CHECK(r3[0].multiplicity == 2);
  CHECK(r3[0].complex_witness == Z({1, 0, 1}));
  CHECK(r3[0].center().is_zero());
  CHECK(r3[0].to_json().dump() ==
        R"({"tag":"complex_pair","multiplicity":2,"ramification":2,"depth":"1/2","terms":[],"leading_root_of":"z^2 + 1"})");

  auto r4 = puiseux_roots(gen::poly_from_roots(H("1"), {H("1"), H("1 + t^(1)")}), G(6));
  std::vector<HahnSeries> c4;
  for (const auto& r : r4) c4.push_back(r.center());
  CHECK(as_strings(c4) == std::set<std::string>{"1", "1 + 1*t^(1)"});

  // Complex pair below a real prefix: (x - 1)^2 + t^2.
  auto r5 = puiseux_roots({S("1 + t^(2)"), S("-2"), S("1")}, G(6));
  REQUIRE(r5.size() == 1);
  CHECK(r5[0].tag == Conjugacy::complex_pair);
  CHECK(to_string(r5[0].center()) == "1");
  CHECK(r5[0].depth == ExtValue(G(1)));
}

TEST_CASE("puiseux branches recover exact roots") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    auto roots = random_roots(rng, gen::uniform(rng, 1, 4));
    HahnSeries lc = gen::series(rng, ratio(gen::uniform(rng, -2, 2), 2), 2);
    auto found = puiseux_roots(gen::poly_from_roots(lc, roots), G(8));
    std::vector<HahnSeries> got;
    for (const auto& r : found) {
      CHECK(r.exact());
      CHECK(r.multiplicity == 1);
      got.push_back(r.center());
    }
    CHECK(as_strings(got) == as_strings(roots));
  }
}

TEST_CASE("puiseux branch count matches the squarefree degree") {
  std::mt19937_64 rng(22);
  const char* quads[] = {"-2*t^(1)", "t^(1)", "-3*t^(1/2)", "1"};
  for (int trial = 0; trial < 100; ++trial) {
    auto roots = random_roots(rng, gen::uniform(rng, 0, 3));
    SeriesPoly p = gen::poly_from_roots(H("1"), roots);
    unsigned deg = static_cast<unsigned>(roots.size());
    for (int k = 0, n = gen::uniform(rng, 1, 2); k < n; ++k) {
      HahnSeries shift = gen::uniform(rng, 0, 1) ? HahnSeries(1) : H(std::to_string(k + 1));
      // (x - shift)^2 + q
      SeriesPoly quad{TruncatedSeries(shift * shift) + S(quads[gen::uniform(rng, 0, 3)]),
                      TruncatedSeries(shift.scaled(-2)), S("1")};
      p = gen::poly_mul(p, quad);
      deg += 2;
    }
    auto sq = poly_squarefree_part(p);
    auto found = puiseux_roots(p, G(6));
    CHECK(total_multiplicity(found) == sq.size() - 1);
    CHECK(sq.size() - 1 <= deg);
  }
}

TEST_CASE("truncated branch agrees with the Hensel root") {
  // 1 + y + t y^2: the branch through -1 is the Catalan generating series.
  SeriesPoly p{S("1"), S("1"), S("t^(1)")};
  auto found = puiseux_roots(p, G(5));
  REQUIRE(found.size() == 2);
  const PuiseuxRoot* catalan = nullptr;
  for (const auto& r : found)
    if (!r.terms.empty() && r.terms[0].exp == G(0)) catalan = &r;
  REQUIRE(catalan);
  CHECK(catalan->depth == ExtValue(G(5)));
  HahnSeries want = hensel_root({S("t^(1)")}, G(5)).approx().truncated_below(ExtValue(G(5)));
  CHECK(catalan->center() == want);
  CHECK(to_string(want) == "-1 - 1*t^(1) - 2*t^(2) - 5*t^(3) - 14*t^(4)");
  // Back-substitution: the residual lies beyond the depth.
  CHECK(poly_eval(p, TruncatedSeries(catalan->center())).approx().valuation() >= G(5));
}

TEST_CASE("rv of a polynomial is the product over its roots") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    auto roots = random_roots(rng, gen::uniform(rng, 1, 4));
    HahnSeries lc = gen::series(rng, 0, 2);
    SeriesPoly p = gen::poly_from_roots(lc, roots);
    auto found = puiseux_roots(p, G(8));
    GroupElement lambda = G(ratio(gen::uniform(rng, 0, 4), 2));
    HahnSeries x = gen::series(rng, ratio(gen::uniform(rng, -2, 4), 2), 4);
    auto value = poly_eval(p, TruncatedSeries(x));
    if (value.is_exact_zero()) continue;
    RvElement prod = rv_lambda(TruncatedSeries(lc), lambda);
    for (const auto& r : found)
      prod = rv_combine(RvOp::mul, prod, rv_lambda(TruncatedSeries(x - r.center()), lambda));
    CHECK(prod == rv_lambda(value, lambda));
  }
}

TEST_CASE("truncated polynomial evaluation matches exact evaluation") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    auto roots = random_roots(rng, gen::uniform(rng, 1, 5));
    SeriesPoly p = gen::poly_from_roots(gen::series(rng, ratio(gen::uniform(rng, -1, 2), 4), 2), roots);
    HahnSeries x = gen::series(rng, ratio(gen::uniform(rng, -4, 8), 3), 4);
    GroupElement target = G(ratio(gen::uniform(rng, -2, 30), 4));
    auto got = polynomial_evaluable(p)(TruncatedSeries(x), target);
    auto exact = poly_eval(p, TruncatedSeries(x));
    CAPTURE(poly_to_string(p));
    CAPTURE(to_string(x));
    CHECK(!(got.prec() < ExtValue(target)));
    CHECK(got.approx() == exact.approx().truncated_below(got.prec()));
  }
}

TEST_CASE("preparing points") {
  auto pts = [](const SeriesPoly& p) { return as_strings(preparing_points(p, G(8)).centers()); };
  CHECK(pts({S("0"), S("0"), S("1")}) == std::set<std::string>{"0"});
  CHECK(pts({S("-1*t^(1)"), S("0"), S("1")}) == std::set<std::string>{"0", "1*t^(1/2)", "-1*t^(1/2)"});
  CHECK(pts(gen::poly_from_roots(H("1"), {H("1"), H("1 + t^(1)")})) ==
        std::set<std::string>{"1", "1 + 1*t^(1)", "1 + 1/2*t^(1)"});

  auto set = preparing_points({S("-1*t^(1)"), S("0"), S("1")}, G(8));
  CHECK(set.to_json().dump() ==
        R"j({"points":[{"series":"-1*t^(1/2)","depth":"inf","provenance":{"poly":"(1)*x^2 + (-1*t^(1))","derivative_order":0}},)j"
        R"j({"series":"1*t^(1/2)","depth":"inf","provenance":{"poly":"(1)*x^2 + (-1*t^(1))","derivative_order":0}},)j"
        R"j({"series":"0","depth":"inf","provenance":{"poly":"(2)*x","derivative_order":1}}]})j");
}

TEST_CASE("prepared sets pass the sampling verifier") {
  struct Case {
    SeriesPoly p;
    Rational lambda;
  };
  std::vector<Case> cases{
      {{S("-1*t^(1)"), S("0"), S("1")}, 0},
      {{S("-2*t^(1)"), S("0"), S("1")}, 1},
      {{S("t^(1)"), S("0"), S("1")}, 1},
      {gen::poly_from_roots(H("1"), {H("1"), H("1 + t^(1)")}), 1},
      {{S("1"), S("1"), S("t^(1)")}, 2},
  };
  for (const auto& c : cases) {
    auto set = prepare_polynomial(c.p, G(c.lambda));
    auto rep = verify_preparation(polynomial_evaluable(c.p), set.centers(), G(c.lambda), 500, 7);
    CHECK(rep.passed());
    CHECK(rep.skipped == 0);

    // Monotonicity: extra centres do not break preparation.
    auto more = set.centers();
    more.push_back(H("3 + t^(1/3)"));
    more.push_back(H("-1*t^(2)"));
    CHECK(verify_preparation(polynomial_evaluable(c.p), more, G(c.lambda), 300, 8).passed());
  }
}

TEST_CASE("an undersized set is rejected") {
  SeriesPoly p{S("-1*t^(1)"), S("0"), S("1")};
  auto rep = verify_preparation(polynomial_evaluable(p), {HahnSeries(1)}, G(0), 5000, 1);
  CHECK_FALSE(rep.passed());
  REQUIRE(!rep.violations.empty());
  // Witness pairs are ball-mates with different rv of p.
  auto x = S(rep.violations[0].x), y = S(rep.violations[0].y);
  CHECK(rv_lambda(x, G(0)) == rv_lambda(y, G(0)));
  auto rv_or_zero = [&](const TruncatedSeries& a) {
    auto v = poly_eval(p, a);
    return v.is_exact_zero() ? RvElement::make_zero(G(0)) : rv_lambda(v, G(0));
  };
  CHECK_FALSE(rv_or_zero(x) == rv_or_zero(y));
}

TEST_CASE("jacobian probe") {
  std::vector<HahnSeries> C{HahnSeries(1)};
  auto square = [](const TruncatedSeries& x, const GroupElement&) { return x * x; };
  auto rep = jacobian_probe(square, C, 300, 3);
  CHECK(rep.passed());
  // Around a point of valuation g the shift is v(2a) = g.
  for (const auto& e : rep.details["shifts"]) CHECK(e["shift"] == e["ball"]["gamma"]);

  auto inverse = [](const TruncatedSeries& x, const GroupElement& target) {
    return invert(x, target);
  };
  auto rep2 = jacobian_probe(inverse, C, 300, 4);
  CHECK(rep2.passed());
  for (const auto& e : rep2.details["shifts"]) {
    Rational g = parse_rational(e["ball"]["gamma"].get<std::string>());
    CHECK(e["shift"] == to_string(Rational(-2 * g)));
  }

  SamplerOptions opt;
  opt.window_lo = Rational(1, 4);
  auto root = [](const TruncatedSeries& a, const GroupElement& target) { return hensel_root({a}, target); };
  auto rep3 = jacobian_probe(root, C, 200, 5, opt);
  CHECK(rep3.passed());
  for (const auto& e : rep3.details["shifts"]) CHECK(e["shift"] == "0");
}

TEST_CASE("strong unit probe") {
  Annulus a{HahnSeries(1), H("t^(2)"), H("1")};
  StrongUnit good{parse_multiseries("[1*t^(1/2)]*x1^2", 1), parse_multiseries("[1*t^(1)]*x1", 1)};
  for (int lam = 0; lam <= 2; ++lam) {
    auto rep = strong_unit_probe(good, a, G(lam), 500, 9);
    CHECK(rep.passed());
  }
  // 1 - t^(-1/2) x vanishes inside the annulus, at x = t^(1/2).
  StrongUnit bad{MultiSeries(1, 0), parse_multiseries("[-1*t^(-1/2)]*x1", 1)};
  CHECK(kind_of([&] { strong_unit_probe(bad, a, G(0), 10, 1); }) == ErrorKind::InvalidArgument);
  auto rep = strong_unit_probe(bad, a, G(0), 3000, 1, false);
  CHECK_FALSE(rep.passed());

  CHECK(kind_of([&] { strong_unit_probe(good, Annulus{HahnSeries(1), H("1"), H("t^(2)")}, G(0), 1, 1); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { evaluate_strong_unit(good, a, S("t^(3)"), G(4)); }) == ErrorKind::DomainViolation);
}

TEST_CASE("preparation reports are deterministic") {
  SeriesPoly p{S("-2*t^(1)"), S("0"), S("1")};
  auto run = [&] {
    auto set = prepare_polynomial(p, G(1));
    return set.to_json().dump() +
           verify_preparation(polynomial_evaluable(p), set.centers(), G(1), 200, 42).to_json().dump();
  };
  CHECK(run() == run());
}
