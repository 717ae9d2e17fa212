#include "hahn/series.hpp"

#include <algorithm>

#include "hahn/error.hpp"

namespace hahn {

namespace {

void require_same_rank(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorKind::RankMismatch,
                "series ranks " + std::to_string(a) + " and " + std::to_string(b));
}

// Merge a sorted run that may contain duplicate exponents.
std::vector<SeriesTerm> normalize(std::vector<SeriesTerm> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const SeriesTerm& x, const SeriesTerm& y) { return x.exp < y.exp; });
  std::vector<SeriesTerm> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    t.coeff.canonicalize();
    if (!out.empty() && out.back().exp == t.exp) {
      out.back().coeff += t.coeff;
    } else {
      if (!out.empty() && sgn(out.back().coeff) == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && sgn(out.back().coeff) == 0) out.pop_back();
  return out;
}

}  // namespace

HahnSeries HahnSeries::from_terms(std::vector<SeriesTerm> terms, std::size_t rank) {
  for (const auto& t : terms) require_same_rank(t.exp.rank(), rank);
  HahnSeries s(rank);
  s.terms_ = normalize(std::move(terms));
  return s;
}

HahnSeries HahnSeries::constant(const Rational& c, std::size_t rank) {
  HahnSeries s(rank);
  if (sgn(c) != 0) s.terms_.push_back({GroupElement(rank), Rational(c)});
  for (auto& t : s.terms_) t.coeff.canonicalize();
  return s;
}

HahnSeries HahnSeries::monomial(const Rational& c, const GroupElement& exp) {
  HahnSeries s(exp.rank());
  if (sgn(c) != 0) s.terms_.push_back({exp, Rational(c)});
  for (auto& t : s.terms_) t.coeff.canonicalize();
  return s;
}

const GroupElement& HahnSeries::valuation() const {
  if (terms_.empty()) throw Error(ErrorKind::InvalidArgument, "valuation of the zero series");
  return terms_.front().exp;
}

const Rational& HahnSeries::leading_coeff() const {
  if (terms_.empty()) throw Error(ErrorKind::InvalidArgument, "leading coefficient of zero");
  return terms_.front().coeff;
}

const GroupElement& HahnSeries::max_exponent() const {
  if (terms_.empty()) throw Error(ErrorKind::InvalidArgument, "max exponent of zero");
  return terms_.back().exp;
}

Rational HahnSeries::coeff_at(const GroupElement& e) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                             [](const SeriesTerm& t, const GroupElement& g) { return t.exp < g; });
  if (it != terms_.end() && it->exp == e) return it->coeff;
  return Rational(0);
}

HahnSeries HahnSeries::truncated_below(const ExtValue& bound) const {
  if (bound.is_infinite()) return *this;
  HahnSeries s(rank_);
  for (const auto& t : terms_) {
    if (!(t.exp < bound.value())) break;
    s.terms_.push_back(t);
  }
  return s;
}

HahnSeries HahnSeries::truncated_at_most(const GroupElement& bound) const {
  HahnSeries s(rank_);
  for (const auto& t : terms_) {
    if (bound < t.exp) break;
    s.terms_.push_back(t);
  }
  return s;
}

HahnSeries HahnSeries::shifted(const GroupElement& g) const {
  HahnSeries s(*this);
  for (auto& t : s.terms_) t.exp += g;
  return s;
}

HahnSeries HahnSeries::scaled(const Rational& c) const {
  if (sgn(c) == 0) return HahnSeries(rank_);
  HahnSeries s(*this);
  for (auto& t : s.terms_) t.coeff *= c;
  return s;
}

HahnSeries HahnSeries::operator-() const { return scaled(Rational(-1)); }

HahnSeries operator+(const HahnSeries& a, const HahnSeries& b) {
  require_same_rank(a.rank_, b.rank_);
  HahnSeries s(a.rank_);
  s.terms_.reserve(a.terms_.size() + b.terms_.size());
  auto i = a.terms_.begin(), j = b.terms_.begin();
  while (i != a.terms_.end() || j != b.terms_.end()) {
    if (j == b.terms_.end() || (i != a.terms_.end() && i->exp < j->exp)) {
      s.terms_.push_back(*i++);
    } else if (i == a.terms_.end() || j->exp < i->exp) {
      s.terms_.push_back(*j++);
    } else {
      Rational c = i->coeff + j->coeff;
      if (sgn(c) != 0) s.terms_.push_back({i->exp, c});
      ++i;
      ++j;
    }
  }
  return s;
}

HahnSeries operator-(const HahnSeries& a, const HahnSeries& b) { return a + (-b); }

HahnSeries HahnSeries::mul_below(const HahnSeries& a, const HahnSeries& b, const ExtValue& bound) {
  require_same_rank(a.rank_, b.rank_);
  HahnSeries s(a.rank_);
  if (a.is_zero() || b.is_zero()) return s;
  std::vector<SeriesTerm> raw;
  raw.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) {
      GroupElement e = x.exp + y.exp;
      if (bound.is_finite() && !(e < bound.value())) break;  // b ascending
      raw.push_back({std::move(e), x.coeff * y.coeff});
    }
  }
  s.terms_ = normalize(std::move(raw));
  return s;
}

HahnSeries operator*(const HahnSeries& a, const HahnSeries& b) {
  return HahnSeries::mul_below(a, b, ExtValue());
}

bool operator==(const HahnSeries& a, const HahnSeries& b) {
  if (a.rank_ != b.rank_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].exp != b.terms_[i].exp || a.terms_[i].coeff != b.terms_[i].coeff) return false;
  return true;
}

// ---------------------------------------------------------------------------

TruncatedSeries::TruncatedSeries(HahnSeries exact)
    : approx_(std::move(exact)), prec_(ExtValue::infinity(approx_.rank())) {}

TruncatedSeries::TruncatedSeries(HahnSeries approx, ExtValue prec)
    : approx_(approx.truncated_below(prec)), prec_(std::move(prec)) {
  if (prec_.is_finite()) require_same_rank(prec_.value().rank(), approx_.rank());
}

ExtValue TruncatedSeries::valuation_lower_bound() const {
  if (approx_.is_zero()) return prec_;
  return ExtValue(approx_.valuation());
}

TruncatedSeries TruncatedSeries::with_prec(const ExtValue& p) const {
  if (!(p < prec_)) return *this;
  return TruncatedSeries(approx_, p);
}

TruncatedSeries TruncatedSeries::operator-() const { return TruncatedSeries(-approx_, prec_); }

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
  ExtValue p = min(a.prec_, b.prec_);
  return TruncatedSeries(a.approx_ + b.approx_, p);
}

TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
  ExtValue p = min(a.prec_, b.prec_);
  return TruncatedSeries(a.approx_ - b.approx_, p);
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  ExtValue p = min(min(a.prec_ + b.valuation_lower_bound(), b.prec_ + a.valuation_lower_bound()),
                   a.prec_ + b.prec_);
  return TruncatedSeries(HahnSeries::mul_below(a.approx_, b.approx_, p), p);
}

bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
  return a.prec_ == b.prec_ && a.approx_ == b.approx_;
}

TruncatedSeries TruncatedSeries::scaled(const Rational& c) const {
  if (sgn(c) == 0) return TruncatedSeries(HahnSeries(rank()));
  return TruncatedSeries(approx_.scaled(c), prec_);
}

TruncatedSeries TruncatedSeries::shifted(const GroupElement& g) const {
  return TruncatedSeries(approx_.shifted(g), prec_ + g);
}

TruncatedSeries field_op(FieldOpKind kind, const TruncatedSeries& a, const TruncatedSeries& b) {
  switch (kind) {
    case FieldOpKind::add: return a + b;
    case FieldOpKind::sub: return a - b;
    case FieldOpKind::mul: return a * b;
  }
  return a;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxSeriesIterations = 20000;

// (1 + u)^{-1} below `bound`, u with positive valuation.
HahnSeries geometric_inverse(const HahnSeries& u, const ExtValue& bound) {
  std::size_t rank = u.rank();
  HahnSeries sum = HahnSeries::constant(1, rank).truncated_below(bound);
  HahnSeries term = HahnSeries::constant(1, rank);
  HahnSeries minus_u = -u;
  for (int k = 0; k < kMaxSeriesIterations; ++k) {
    term = HahnSeries::mul_below(term, minus_u, bound);
    if (term.is_zero()) return sum;
    sum = sum + term;
  }
  throw Error(ErrorKind::IterationLimit,
              "geometric series did not reach the requested precision (lex rank > 1?)");
}

}  // namespace

TruncatedSeries invert(const TruncatedSeries& a, const GroupElement& target_prec) {
  if (a.approx().is_zero())
    throw Error(ErrorKind::ZeroOrUncertainLeadingTerm,
                a.is_exact() ? "inverse of zero" : "leading term not determined at precision " +
                                                       a.prec().to_string());
  const GroupElement v = a.approx().valuation();
  const Rational c = a.approx().leading_coeff();
  const std::size_t rank = a.rank();
  // Unit part u with a = c t^v (1 + u).
  HahnSeries u = a.approx().shifted(-v).scaled(1 / c) - HahnSeries::constant(1, rank);
  ExtValue out_prec = a.is_exact() ? ExtValue(target_prec)
                                   : min(ExtValue(target_prec), a.prec() - v - v);
  if (u.is_zero() && a.is_exact())
    return TruncatedSeries(HahnSeries::monomial(1 / c, -v));
  HahnSeries w = geometric_inverse(u, out_prec + v);
  return TruncatedSeries(w.shifted(-v).scaled(1 / c), out_prec);
}

Sign compare_sign(const TruncatedSeries& a) {
  if (a.approx().is_zero()) {
    if (a.is_exact()) return Sign::zero;
    throw Error(ErrorKind::UndecidableAtPrecision,
                "sign of O(t^(" + a.prec().to_string() + "))");
  }
  return sgn(a.approx().leading_coeff()) > 0 ? Sign::positive : Sign::negative;
}

ExtValue valuation(const TruncatedSeries& a) {
  if (a.approx().is_zero()) {
    if (a.is_exact()) return ExtValue::infinity(a.rank());
    throw Error(ErrorKind::UndecidableAtPrecision,
                "valuation of O(t^(" + a.prec().to_string() + "))");
  }
  return ExtValue(a.approx().valuation());
}

Rational standard_part(const TruncatedSeries& a) {
  if (a.approx().is_zero()) {
    if (a.is_exact() || a.prec().value().sign() > 0) return Rational(0);
    throw Error(ErrorKind::UndecidableAtPrecision,
                "standard part of O(t^(" + a.prec().to_string() + "))");
  }
  if (a.approx().valuation().sign() < 0)
    throw Error(ErrorKind::NotInValuationRing, "v(a) = " + a.approx().valuation().to_string());
  return a.approx().coeff_at(GroupElement(a.rank()));
}

bool rational_nth_root(const Rational& q, unsigned n, Rational& out) {
  if (n == 0) return false;
  if (sgn(q) < 0 && n % 2 == 0) return false;
  Integer num = abs(q.get_num()), den = q.get_den();
  Integer rn, rd;
  if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), n)) return false;
  if (!mpz_root(rd.get_mpz_t(), den.get_mpz_t(), n)) return false;
  out = Rational(rn, rd);
  out.canonicalize();
  if (sgn(q) < 0) out = -out;
  return true;
}

TruncatedSeries power(const TruncatedSeries& a, unsigned k, const ExtValue& cap) {
  TruncatedSeries result = TruncatedSeries::constant(1, a.rank()).with_prec(cap);
  TruncatedSeries base = a.with_prec(cap);
  while (k) {
    if (k & 1u) result = (result * base).with_prec(cap);
    k >>= 1u;
    if (k) base = (base * base).with_prec(cap);
  }
  return result;
}

TruncatedSeries nth_root(const TruncatedSeries& a, unsigned n, const GroupElement& target_prec) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "0-th root");
  if (compare_sign(a) != Sign::positive)
    throw Error(ErrorKind::NotPositive, "nth_root of a non-positive element");
  const std::size_t rank = a.rank();
  const GroupElement v = a.approx().valuation();
  const Rational c = a.approx().leading_coeff();
  Rational root_c;
  if (!rational_nth_root(c, n, root_c))
    throw Error(ErrorKind::IrrationalRoot,
                "leading coefficient " + to_string(c) + " has no rational root of order " +
                    std::to_string(n));
  const GroupElement root_v = v.scaled(Rational(1, n));
  // a = c t^v u with u = 1 + (positive valuation); solve y^n = u.
  TruncatedSeries u(a.approx().shifted(-v).scaled(1 / c), a.prec() - v);
  ExtValue py = min(ExtValue(target_prec - v), u.prec());
  const HahnSeries& uu = u.approx();

  HahnSeries y = HahnSeries::constant(1, rank).truncated_below(py);
  for (int iter = 0; iter < 64; ++iter) {
    HahnSeries yn = HahnSeries::constant(1, rank);
    for (unsigned k = 0; k < n; ++k) yn = HahnSeries::mul_below(yn, y, py);
    HahnSeries residual = (yn - uu).truncated_below(py);
    if (residual.is_zero()) break;
    HahnSeries dy = HahnSeries::constant(n, rank);
    for (unsigned k = 0; k + 1 < n; ++k) dy = HahnSeries::mul_below(dy, y, py);
    if (dy.is_zero()) break;
    TruncatedSeries inv = invert(TruncatedSeries(dy), py.is_finite() ? py.value() : GroupElement(rank));
    y = (y - HahnSeries::mul_below(residual, inv.approx(), py)).truncated_below(py);
  }
  if (a.is_exact()) {
    HahnSeries yn = HahnSeries::constant(1, rank);
    for (unsigned k = 0; k < n; ++k) yn = yn * y;
    if (yn == uu) return TruncatedSeries(y.shifted(root_v).scaled(root_c));
  }
  return TruncatedSeries(y.shifted(root_v).scaled(root_c), py + root_v);
}

}  // namespace hahn
