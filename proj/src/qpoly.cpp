#include "hahn/qpoly.hpp"

#include <optional>

#include "hahn/error.hpp"

namespace hahn {

QPoly::QPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) {
  for (auto& c : c_) c.canonicalize();
  trim();
}

QPoly QPoly::monomial(const Rational& c, unsigned k) {
  std::vector<Rational> v(k + 1, Rational(0));
  v[k] = c;
  return QPoly(std::move(v));
}

void QPoly::trim() {
  while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
}

Rational QPoly::eval(const Rational& z) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  acc.canonicalize();
  return acc;
}

QPoly QPoly::derivative() const {
  std::vector<Rational> d;
  for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * Rational(static_cast<unsigned long>(k)));
  return QPoly(std::move(d));
}

QPoly QPoly::scaled(const Rational& q) const {
  std::vector<Rational> v = c_;
  for (auto& c : v) c *= q;
  return QPoly(std::move(v));
}

QPoly QPoly::monic() const { return is_zero() ? *this : scaled(1 / leading()); }

QPoly QPoly::integer_normalized() const {
  if (is_zero()) return *this;
  Integer den = 1;
  for (const auto& c : c_) den = lcm(den, Integer(c.get_den()));
  Integer g = 0;
  for (const auto& c : c_) g = gcd(g, Integer(c.get_num() * (den / c.get_den())));
  Rational f = Rational(den) / Rational(g);
  if (sgn(leading()) < 0) f = -f;
  return scaled(f);
}

QPoly operator+(const QPoly& a, const QPoly& b) {
  std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
  for (std::size_t k = 0; k < a.c_.size(); ++k) v[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) v[k] += b.c_[k];
  return QPoly(std::move(v));
}

QPoly operator-(const QPoly& a, const QPoly& b) { return a + b.scaled(-1); }

QPoly operator*(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> v(a.c_.size() + b.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return QPoly(std::move(v));
}

std::string QPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::string out;
  for (std::size_t k = c_.size(); k-- > 0;) {
    if (sgn(c_[k]) == 0) continue;
    Rational c = c_[k];
    if (!out.empty()) {
      out += sgn(c) < 0 ? " - " : " + ";
      c = abs(c);
    }
    std::string cs = hahn::to_string(c);
    if (k == 0) {
      out += cs;
      continue;
    }
    if (c == 1) cs.clear();
    else if (c == -1) cs = "-";
    else cs += "*";
    out += cs + var + (k > 1 ? "^" + std::to_string(k) : "");
  }
  return out;
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw Error(ErrorKind::InvalidArgument, "polynomial division by zero");
  std::vector<Rational> r = a.coeffs();
  const int db = b.degree();
  std::vector<Rational> q(a.degree() >= db ? a.degree() - db + 1 : 0, Rational(0));
  for (int d = a.degree(); d >= db; --d) {
    Rational c = r[d] / b.leading();
    if (sgn(c) == 0) continue;
    q[d - db] = c;
    for (int k = 0; k <= db; ++k) r[d - db + k] -= c * b.coeffs()[k];
  }
  return {QPoly(std::move(q)), QPoly(std::move(r))};
}

QPoly gcd(const QPoly& a, const QPoly& b) {
  QPoly x = a, y = b;
  while (!y.is_zero()) {
    QPoly r = divmod(x, y).second;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

QPoly squarefree_part(const QPoly& p) {
  if (p.degree() <= 0) return p;
  return divmod(p, gcd(p, p.derivative())).first.monic();
}

std::vector<std::pair<QPoly, unsigned>> squarefree_decomposition(const QPoly& p) {
  std::vector<std::pair<QPoly, unsigned>> out;
  if (p.degree() <= 0) return out;
  QPoly a = gcd(p, p.derivative());
  QPoly b = divmod(p, a).first;
  QPoly c = divmod(p.derivative(), a).first;
  QPoly d = c - b.derivative();
  for (unsigned i = 1; b.degree() > 0; ++i) {
    a = gcd(b, d);
    if (a.degree() > 0) out.emplace_back(a.monic(), i);
    b = divmod(b, a).first;
    c = divmod(d, a).first;
    d = c - b.derivative();
  }
  return out;
}

namespace {

std::vector<QPoly> sturm_sequence(const QPoly& p) {
  std::vector<QPoly> seq{p, p.derivative()};
  while (!seq.back().is_zero()) {
    QPoly r = divmod(seq[seq.size() - 2], seq.back()).second;
    if (r.is_zero()) break;
    seq.push_back(r.scaled(-1));
  }
  return seq;
}

int sign_changes(const std::vector<QPoly>& seq, const Rational& z) {
  int changes = 0, last = 0;
  for (const auto& q : seq) {
    int s = q.sign_at(z);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// Roots in (lo, hi].
int count_roots(const std::vector<QPoly>& seq, const Rational& lo, const Rational& hi) {
  return sign_changes(seq, lo) - sign_changes(seq, hi);
}

void isolate(const std::vector<QPoly>& seq, const Rational& lo, const Rational& hi, int n,
             std::vector<RealRoot>& out) {
  if (n == 0) return;
  if (n == 1) {
    if (seq[0].sign_at(hi) == 0) out.push_back({hi, hi, true});
    else out.push_back({lo, hi, false});
    return;
  }
  Rational mid = (lo + hi) / 2;
  int left = count_roots(seq, lo, mid);
  isolate(seq, lo, mid, left, out);
  isolate(seq, mid, hi, n - left, out);
}

std::optional<Rational> simplest_open(const Rational& lo, const std::optional<Rational>& hi) {
  Rational fl(floor(lo));
  Rational cand = fl + 1;
  if (!hi || cand < *hi) return cand;
  Rational flo = lo - fl, fhi = *hi - fl;
  std::optional<Rational> upper;
  if (sgn(flo) != 0) upper = Rational(1 / flo);
  Rational y = *simplest_open(Rational(1 / fhi), upper);
  Rational r = fl + 1 / y;
  r.canonicalize();
  return r;
}

}  // namespace

Rational simplest_rational(const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw Error(ErrorKind::InvalidArgument, "empty interval");
  if (sgn(lo) < 0 && sgn(hi) > 0) return 0;
  if (sgn(hi) <= 0) return -*simplest_open(-hi, Rational(-lo));
  return *simplest_open(lo, hi);
}

RealRoot refine_root(const QPoly& p, RealRoot r, const Rational& width) {
  if (r.exact) return r;
  auto seq = sturm_sequence(p);
  while (r.hi - r.lo > width) {
    Rational mid = (r.lo + r.hi) / 2;
    if (p.sign_at(mid) == 0) return {mid, mid, true};
    if (count_roots(seq, r.lo, mid) == 1) r.hi = mid;
    else r.lo = mid;
  }
  return r;
}

std::vector<RealRoot> real_roots(const QPoly& p) {
  std::vector<RealRoot> out;
  if (p.degree() <= 0) return out;
  Rational bound = 0;
  for (const auto& c : p.coeffs()) bound = std::max(bound, Rational(abs(c / p.leading())));
  bound += 1;
  auto seq = sturm_sequence(p);
  isolate(seq, -bound, bound, count_roots(seq, -bound, bound), out);

  // A rational root has denominator dividing the integer leading
  // coefficient L; two such rationals are at least 1/L^2 apart.
  Integer L = abs(p.integer_normalized().leading().get_num());
  Rational width = Rational(1) / Rational(L * L + 1);
  for (auto& r : out) {
    if (r.exact) continue;
    r = refine_root(p, r, width);
    if (r.exact) continue;
    Rational s = simplest_rational(r.lo, r.hi);
    if (p.sign_at(s) == 0) r = {s, s, true};
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void bi_trim(BiPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

int bi_degree(const BiPoly& p) { return static_cast<int>(p.size()) - 1; }

BiPoly bi_primitive(BiPoly p) {
  bi_trim(p);
  QPoly content;
  for (const auto& c : p) content = gcd(content, c);
  if (content.is_zero()) return p;
  for (auto& c : p) c = divmod(c, content).first;
  return p;
}

BiPoly bi_derivative(const BiPoly& p) {
  BiPoly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k].scaled(Rational(static_cast<unsigned long>(k))));
  bi_trim(d);
  return d;
}

// lc(b)^k a = q b + r; returns {q, r}.
std::pair<BiPoly, BiPoly> bi_pseudo_divide(const BiPoly& a, const BiPoly& b) {
  BiPoly r = a, q;
  bi_trim(r);
  const int n = bi_degree(b);
  const QPoly& lb = b.back();
  while (bi_degree(r) >= n && !r.empty()) {
    const int d = bi_degree(r);
    QPoly lr = r.back();
    for (auto& c : q) c = c * lb;
    if (q.size() < static_cast<std::size_t>(d - n + 1)) q.resize(d - n + 1);
    q[d - n] = q[d - n] + lr;
    for (auto& c : r) c = c * lb;
    for (int k = 0; k <= n; ++k) r[d - n + k] = r[d - n + k] - lr * b[k];
    bi_trim(r);
  }
  bi_trim(q);
  return {q, r};
}

BiPoly bi_gcd(BiPoly a, BiPoly b) {
  a = bi_primitive(std::move(a));
  b = bi_primitive(std::move(b));
  if (bi_degree(a) < bi_degree(b)) std::swap(a, b);
  while (!b.empty()) {
    if (bi_degree(b) == 0) return {QPoly::constant(1)};
    BiPoly r = bi_pseudo_divide(a, b).second;
    a = std::move(b);
    b = bi_primitive(std::move(r));
  }
  return a;
}

// Coprime to its derivative after specializing s: then it is squarefree
// over Q(s) as well.
bool specializes_squarefree(const BiPoly& p) {
  for (int s0 : {2, 3, 7, 11}) {
    std::vector<Rational> c;
    for (const auto& q : p) c.push_back(q.eval(Rational(s0)));
    QPoly ps(std::move(c));
    if (ps.degree() != bi_degree(p)) continue;
    if (gcd(ps, ps.derivative()).degree() == 0) return true;
  }
  return false;
}

}  // namespace

BiPoly bi_squarefree_part(const BiPoly& p) {
  BiPoly a = p;
  bi_trim(a);
  if (bi_degree(a) <= 1 || specializes_squarefree(a)) return a;
  a = bi_primitive(std::move(a));
  BiPoly g = bi_gcd(a, bi_derivative(a));
  if (bi_degree(g) <= 0) return a;
  return bi_primitive(bi_pseudo_divide(a, g).first);
}

}  // namespace hahn
