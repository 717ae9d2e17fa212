#include "hahn/puiseux.hpp"

#include <optional>

#include "hahn/error.hpp"

namespace hahn {

namespace {

SeriesPoly trimmed(SeriesPoly p) {
  while (!p.empty() && p.back().is_exact_zero()) p.pop_back();
  return p;
}

Integer binomial(unsigned n, unsigned k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

GroupElement exp_of(const GroupElement& g, unsigned k) { return g.scaled(Rational(k)); }

}  // namespace

SeriesPoly poly_derivative(const SeriesPoly& p) {
  SeriesPoly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k].scaled(Rational(static_cast<unsigned long>(k))));
  return d;
}

TruncatedSeries poly_eval(const SeriesPoly& p, const TruncatedSeries& x) {
  TruncatedSeries acc(x.rank());
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::string poly_to_string(const SeriesPoly& p) {
  std::string out;
  for (std::size_t k = p.size(); k-- > 0;) {
    if (p[k].is_exact_zero()) continue;
    if (!out.empty()) out += " + ";
    out += "(" + to_string(p[k]) + ")";
    if (k >= 1) out += "*x";
    if (k >= 2) out += "^" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

SeriesPoly poly_squarefree_part(const SeriesPoly& p0) {
  SeriesPoly p = trimmed(p0);
  if (p.size() <= 2) return p;
  for (const auto& c : p)
    if (!c.is_exact() || c.rank() != 1) return p;

  Integer N = 1;
  std::optional<Rational> emin;
  for (const auto& c : p)
    for (const auto& term : c.approx().terms()) {
      const Rational& e = term.exp[0];
      N = lcm(N, Integer(e.get_den()));
      if (!emin || e < *emin) emin = e;
    }
  BiPoly bi;
  for (const auto& c : p) {
    std::vector<Rational> q;
    for (const auto& term : c.approx().terms()) {
      Rational k = (term.exp[0] - *emin) * Rational(N);
      std::size_t idx = k.get_num().get_ui();
      if (q.size() <= idx) q.resize(idx + 1, Rational(0));
      q[idx] = term.coeff;
    }
    bi.push_back(QPoly(std::move(q)));
  }
  BiPoly sq = bi_squarefree_part(bi);
  SeriesPoly out;
  for (const auto& q : sq) {
    std::vector<SeriesTerm> terms;
    for (std::size_t k = 0; k < q.coeffs().size(); ++k)
      if (sgn(q.coeffs()[k]) != 0)
        terms.push_back({GroupElement::scalar(Rational(Integer(k), N)), q.coeffs()[k]});
    out.push_back(TruncatedSeries(HahnSeries::from_terms(std::move(terms), 1)));
  }
  return out;
}

// ---------------------------------------------------------------------------

int IntervalCoeff::sign(int max_steps) const {
  RealRoot r{lo, hi, false};
  for (int i = 0; i <= max_steps; ++i) {
    if (sgn(r.lo) >= 0) return 1;
    if (sgn(r.hi) <= 0) return -1;
    r = refine_root(witness, r, (r.hi - r.lo) / 2);
    if (r.exact) return sgn(r.lo);
  }
  throw Error(ErrorKind::UndecidedSign, "interval " + to_string() + " still straddles 0");
}

IntervalCoeff IntervalCoeff::refined(const Rational& width) const {
  RealRoot r = refine_root(witness, {lo, hi, false}, width);
  if (r.exact) throw Error(ErrorKind::InvalidArgument, "witness has a rational root in the interval");
  return {r.lo, r.hi, witness};
}

std::string IntervalCoeff::to_string() const {
  return "root of " + witness.to_string() + " in (" + hahn::to_string(lo) + ", " + hahn::to_string(hi) + ")";
}

HahnSeries PuiseuxRoot::rational_prefix() const {
  std::vector<SeriesTerm> out;
  std::size_t rank = 1;
  for (const auto& t : terms) {
    rank = t.exp.rank();
    if (!t.is_rational()) break;
    out.push_back({t.exp, std::get<Rational>(t.coeff)});
  }
  if (!depth.is_infinite()) rank = depth.value().rank();
  return HahnSeries::from_terms(std::move(out), rank);
}

HahnSeries PuiseuxRoot::center() const {
  HahnSeries c = rational_prefix();
  for (const auto& t : terms)
    if (!t.is_rational()) {
      c = c + HahnSeries::monomial(std::get<IntervalCoeff>(t.coeff).representative(), t.exp);
      break;
    }
  return c;
}

nlohmann::ordered_json PuiseuxRoot::to_json() const {
  nlohmann::ordered_json j;
  j["tag"] = tag == Conjugacy::real ? "real" : "complex_pair";
  j["multiplicity"] = multiplicity;
  j["ramification"] = ramification;
  j["depth"] = depth.is_infinite() ? "inf" : depth.value().to_string();
  auto& ts = j["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : terms) {
    nlohmann::ordered_json e;
    e["exp"] = t.exp.to_string();
    if (t.is_rational()) {
      e["coeff"] = to_string(std::get<Rational>(t.coeff));
    } else {
      const auto& ic = std::get<IntervalCoeff>(t.coeff);
      e["coeff"] = {{"root_of", ic.witness.to_string()},
                    {"interval", {to_string(ic.lo), to_string(ic.hi)}}};
    }
    ts.push_back(e);
  }
  if (tag == Conjugacy::complex_pair) j["leading_root_of"] = complex_witness.to_string();
  return j;
}

// ---------------------------------------------------------------------------

namespace {

struct Point {
  unsigned i;
  GroupElement v;
};

// B lies on or above the segment AC.
bool on_or_above(const Point& a, const Point& b, const Point& c) {
  GroupElement lhs = (b.v - a.v).scaled(Rational(c.i - a.i));
  GroupElement rhs = (c.v - a.v).scaled(Rational(b.i - a.i));
  return lhs >= rhs;
}

struct Edge {
  Point a, b;
  GroupElement slope() const { return (b.v - a.v).scaled(Rational(1, b.i - a.i)); }
};

std::vector<Edge> lower_hull(const SeriesPoly& p) {
  SeriesPoly q = trimmed(p);
  if (q.empty()) throw Error(ErrorKind::InvalidArgument, "zero polynomial");
  if (!q.back().leading_determined())
    throw Error(ErrorKind::InsufficientPrecision, "leading coefficient valuation undetermined");
  std::size_t low = 0;
  while (q[low].is_exact_zero()) ++low;
  if (!q[low].leading_determined())
    throw Error(ErrorKind::InsufficientPrecision, "trailing coefficient valuation undetermined");

  std::vector<Point> hull;
  std::vector<Point> unknown;
  for (std::size_t i = low; i < q.size(); ++i) {
    if (q[i].is_exact_zero()) continue;
    if (!q[i].leading_determined()) {
      unknown.push_back({static_cast<unsigned>(i), q[i].prec().value()});
      continue;
    }
    Point pt{static_cast<unsigned>(i), q[i].approx().valuation()};
    while (hull.size() >= 2 && on_or_above(hull[hull.size() - 2], hull.back(), pt)) hull.pop_back();
    hull.push_back(pt);
  }
  std::vector<Edge> edges;
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) edges.push_back({hull[k], hull[k + 1]});
  for (const auto& u : unknown) {
    for (const auto& e : edges) {
      if (u.i < e.a.i || u.i > e.b.i) continue;
      // The coefficient may still be as small as its precision: it must sit
      // strictly above the hull to leave it unchanged.
      if (u.v > e.a.v + e.slope().scaled(Rational(u.i - e.a.i))) break;
      throw Error(ErrorKind::InsufficientPrecision,
                  "coefficient of x^" + std::to_string(u.i) + " is too imprecise for the Newton polygon");
    }
  }
  return edges;
}

QPoly characteristic(const SeriesPoly& q, const Edge& e) {
  std::vector<Rational> c;
  GroupElement s = e.slope();
  for (unsigned i = e.a.i; i <= e.b.i; ++i) {
    GroupElement at = e.a.v + s.scaled(Rational(i - e.a.i));
    c.push_back(q[i].approx().coeff_at(at));
  }
  return QPoly(std::move(c));
}

// q(c t^g + x) as a polynomial in x.
SeriesPoly substitute_shift(const SeriesPoly& q, const Rational& c, const GroupElement& g) {
  SeriesPoly out(q.size(), TruncatedSeries(g.rank()));
  for (unsigned i = 0; i < q.size(); ++i) {
    if (q[i].is_exact_zero()) continue;
    Rational cp = 1;
    for (unsigned j = i + 1; j-- > 0;) {
      Rational f = Rational(binomial(i, j)) * cp;
      out[j] = out[j] + q[i].shifted(exp_of(g, i - j)).scaled(f);
      cp *= c;
    }
  }
  return out;
}

class Solver {
 public:
  explicit Solver(GroupElement depth) : depth_(std::move(depth)) {}

  std::vector<PuiseuxRoot> out;

  void solve(SeriesPoly q, std::vector<BranchTerm> prefix, const std::optional<GroupElement>& last) {
    q = trimmed(q);
    unsigned zeros = 0;
    while (zeros < q.size() && q[zeros].is_exact_zero()) ++zeros;
    if (zeros > 0) {
      emit(prefix, ExtValue::infinity(depth_.rank()), Conjugacy::real, zeros);
      q.erase(q.begin(), q.begin() + zeros);
    }
    if (q.size() <= 1) return;

    for (const auto& e : lower_hull(q)) {
      GroupElement gamma = -e.slope();
      if (last && gamma <= *last) continue;
      unsigned m = e.b.i - e.a.i;
      if (gamma >= depth_) {
        emit(prefix, depth_, Conjugacy::real, m);
        continue;
      }
      QPoly phi = characteristic(q, e);
      unsigned real_count = 0;
      for (const auto& [f, k] : squarefree_decomposition(phi)) {
        auto roots = real_roots(f);
        QPoly witness = f;
        for (const auto& r : roots)
          if (r.exact) witness = divmod(witness, QPoly({-r.lo, Rational(1)})).first;
        witness = witness.integer_normalized();
        for (const auto& r : roots) {
          real_count += k;
          auto next = prefix;
          if (r.exact) {
            next.push_back({gamma, r.lo});
            solve(substitute_shift(q, r.lo, gamma), std::move(next), gamma);
          } else {
            next.push_back({gamma, IntervalCoeff{r.lo, r.hi, witness}});
            emit(next, gamma, Conjugacy::real, k);
          }
        }
      }
      if (real_count < m) {
        QPoly w = squarefree_part(phi);
        for (const auto& r : real_roots(w)) {
          if (r.exact) w = divmod(w, QPoly({-r.lo, Rational(1)})).first;
        }
        emit(prefix, gamma, Conjugacy::complex_pair, m - real_count, w.integer_normalized());
      }
    }
  }

 private:
  void emit(const std::vector<BranchTerm>& terms, const ExtValue& depth, Conjugacy tag, unsigned mult,
            QPoly witness = {}) {
    PuiseuxRoot r;
    r.terms = terms;
    r.depth = depth;
    r.tag = tag;
    r.multiplicity = mult;
    r.complex_witness = std::move(witness);
    Integer N = 1;
    auto absorb = [&N](const GroupElement& g) {
      for (const auto& c : g.coords()) N = lcm(N, Integer(c.get_den()));
    };
    for (const auto& t : terms) absorb(t.exp);
    if (tag == Conjugacy::complex_pair || (!terms.empty() && !terms.back().is_rational()))
      absorb(depth.value());
    r.ramification = static_cast<unsigned>(N.get_ui());
    out.push_back(std::move(r));
  }

  GroupElement depth_;
};

}  // namespace

std::vector<PolygonEdge> newton_polygon(const SeriesPoly& p) {
  std::vector<PolygonEdge> out;
  for (const auto& e : lower_hull(p)) out.push_back({-e.slope(), e.b.i - e.a.i});
  return out;
}

std::vector<PuiseuxRoot> puiseux_roots(const SeriesPoly& p, const GroupElement& depth) {
  SeriesPoly q = poly_squarefree_part(p);
  if (q.empty()) throw Error(ErrorKind::InvalidArgument, "zero polynomial");
  for (const auto& c : q)
    if (c.rank() != depth.rank()) throw Error(ErrorKind::RankMismatch, "coefficient rank differs from depth");
  Solver s(depth);
  s.solve(std::move(q), {}, std::nullopt);
  return std::move(s.out);
}

}  // namespace hahn
