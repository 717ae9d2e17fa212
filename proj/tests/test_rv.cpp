#include <random>

#include "doctest.h"
#include "hahn/error.hpp"
#include "hahn/rv.hpp"

using namespace hahn;

namespace {

TruncatedSeries S(const std::string& s) { return parse_series(s); }
GroupElement G(const Rational& q) { return GroupElement::scalar(q); }

HahnSeries random_series(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nterms(1, 4), num(-9, 9), ex(-6, 12);
  std::vector<SeriesTerm> terms;
  for (int i = 0, n = nterms(rng); i < n; ++i) terms.push_back({G(ratio(ex(rng), 3)), Rational(num(rng))});
  auto s = HahnSeries::from_terms(std::move(terms), 1);
  return s.is_zero() ? HahnSeries::constant(1) : s;
}

// Brute-force oracle for rv equality: v(x - y) > v(x) + lambda.
bool same_rv(const HahnSeries& x, const HahnSeries& y, const Rational& lambda) {
  if (x.is_zero() || y.is_zero()) return x.is_zero() && y.is_zero();
  auto d = x - y;
  return d.is_zero() || d.valuation() > x.valuation() + G(lambda);
}

}  // namespace

TEST_CASE("rv_lambda examples") {
  auto r = rv_lambda(S("3*t^(2) + 5*t^(3) + 7*t^(4)"), G(1));
  CHECK(r.gamma == G(2));
  CHECK(r.jet == S("3 + 5*t^(1)").approx());
  auto r0 = rv_lambda(S("3*t^(2) + 5*t^(3)"), G(0));
  CHECK(r0.jet == S("3").approx());
  CHECK(rv_lambda(S("0"), G(1)).zero);
  CHECK(r.to_string() == "(2, 3 + 5*t^(1))");
  CHECK_THROWS_AS(rv_lambda(S("t^(1) + O(t^(2))"), G(1)), Error);
  CHECK(rv_lambda(S("t^(1) + O(t^(5/2))"), G(1)).jet == S("1").approx());
}

TEST_CASE("rv_combine examples") {
  auto p = rv_combine(RvOp::mul, rv_lambda(S("t^(1)"), G(1)), rv_lambda(S("1 + t^(1)"), G(1)));
  CHECK(p == rv_lambda(S("t^(1) + t^(2)"), G(1)));
  auto i = rv_combine(RvOp::inv, rv_lambda(S("2*t^(1)"), G(1)));
  CHECK(i.gamma == G(-1));
  CHECK(i.jet == S("1/2").approx());
  try {
    rv_combine(RvOp::inv, RvElement::make_zero(G(0)));
    FAIL("expected ZeroInverse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroInverse);
  }
}

TEST_CASE("rv is multiplicative and refines") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    HahnSeries x = random_series(rng), y = random_series(rng);
    Rational lam(trial % 4, 2);
    auto rx = rv_lambda(TruncatedSeries(x), G(lam)), ry = rv_lambda(TruncatedSeries(y), G(lam));
    CHECK(rv_combine(RvOp::mul, rx, ry) == rv_lambda(TruncatedSeries(x * y), G(lam)));
    auto inv = invert(TruncatedSeries(x), G(lam + 10) - x.valuation());
    CHECK(rv_combine(RvOp::inv, rx) == rv_lambda(inv, G(lam)));
    // refinement: truncate the finer jet
    auto fine = rv_lambda(TruncatedSeries(x), G(lam + 1));
    CHECK(fine.jet.truncated_at_most(G(lam)) == rx.jet);
    // the fibre relation matches the valuation oracle
    HahnSeries z = x + random_series(rng).shifted(x.valuation() + G(lam));
    CHECK((rv_lambda(TruncatedSeries(z), G(lam)) == rx) == same_rv(x, z, lam));
  }
}

TEST_CASE("angular component") {
  CHECK(angular_component(S("-2*t^(-3) + t^(1)")) == -2);
  CHECK(angular_component(S("t^(7/2)")) == 1);
  CHECK(angular_component(S("0")) == 0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    HahnSeries x = random_series(rng), y = random_series(rng);
    CHECK(angular_component(TruncatedSeries(x * y)) ==
          angular_component(TruncatedSeries(x)) * angular_component(TruncatedSeries(y)));
    if (x.valuation().is_zero()) CHECK(angular_component(TruncatedSeries(x)) == standard_part(x));
  }
}

TEST_CASE("balls") {
  auto b = ball_of(S("t^(1)"), S("0"), G(0));
  CHECK(b.datum.gamma == G(1));
  CHECK(b.datum.jet == S("1").approx());
  CHECK(ball_of(S("2 + t^(1)"), S("2 + t^(1)"), G(3)).is_singleton());
  auto x = S("5*t^(-1) + 3 + t^(2)");
  CHECK(ball_of(x, S("1"), G(2)) == ball_of(x + S("t^(2)"), S("1"), G(2)));
  CHECK(!(ball_of(x, S("1"), G(2)) == ball_of(x + S("t^(1)"), S("1"), G(2))));
}

TEST_CASE("sample_in_ball") {
  BallDescriptor b{S("0"), rv_lambda(S("1"), G(0))};
  auto p = sample_in_ball(b, 1);
  CHECK(b.contains(p));
  CHECK(!(p == sample_in_ball(b, 2)));
  CHECK(p == sample_in_ball(b, 1));
  CHECK_THROWS_AS(sample_in_ball(ball_of(S("1"), S("1"), G(0)), 1), Error);

  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto x = random_series(rng), c = random_series(rng);
    if (x == c) continue;
    Rational lam(seed % 3);
    auto ball = ball_of(TruncatedSeries(x), TruncatedSeries(c), G(lam));
    auto s = sample_in_ball(ball, seed, Rational(3, 2));
    CHECK(ball.contains(s));
    // perturbation below the ball's depth stays inside
    CHECK(ball.contains(s + TruncatedSeries::monomial(7, ball.radius() + G(5))));
  }
}

TEST_CASE("check_prepares") {
  std::vector<TruncatedSeries> C{S("0")};
  auto nonneg_val = [](const TruncatedSeries& x) {
    return x.is_exact_zero() || x.approx().valuation().sign() >= 0;
  };
  auto positive = [](const TruncatedSeries& x) { return compare_sign(x) == Sign::positive; };
  CHECK(check_prepares(C, nonneg_val, G(0), 300, 1).passed());
  for (int lam = 0; lam < 3; ++lam) CHECK(check_prepares(C, positive, G(lam), 300, 2).passed());

  // standard part in [0, 1] is a union of rv_0 fibres around 0
  auto st01 = [](const TruncatedSeries& x) {
    if (!x.is_exact_zero() && x.approx().valuation().sign() < 0) return false;
    Rational s = standard_part(x);
    return s >= 0 && s <= 1;
  };
  CHECK(check_prepares(C, st01, G(0), 300, 3).passed());

  // {x > t} is not prepared by {0}: the ball around t of radius 1 straddles t
  auto above_t = [](const TruncatedSeries& x) {
    return compare_sign(x - parse_series("t^(1)")) == Sign::positive;
  };
  auto rep = check_prepares(C, above_t, G(0), 500, 4);
  REQUIRE(!rep.passed());
  const auto& v = rep.violations.front();
  CHECK(above_t(parse_series(v.x)));
  CHECK(!above_t(parse_series(v.y)));
  CHECK(rep.to_json()["verdict"] == "fail");
  // adding t to C repairs it
  CHECK(check_prepares({S("0"), S("t^(1)")}, above_t, G(0), 500, 4).passed());

  auto j = check_prepares(C, positive, G(1), 20, 77).to_json();
  CHECK(j.dump() == check_prepares(C, positive, G(1), 20, 77).to_json().dump());
  CHECK(j["op"] == "check_prepares");
  CHECK(j["lambda"] == "1");
  CHECK(j["trials"] == 20);
  CHECK(j["seed"] == 77);
}
