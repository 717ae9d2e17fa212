#include "hahn/multiseries.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>

#include "hahn/error.hpp"

namespace hahn {

namespace {

void require_compatible(const MultiSeries& a, const MultiSeries& b) {
  if (a.nvars() != b.nvars())
    throw Error(ErrorKind::InvalidArgument, "series in " + std::to_string(a.nvars()) + " and " +
                                                std::to_string(b.nvars()) + " variables");
  if (a.rank() != b.rank()) throw Error(ErrorKind::RankMismatch, "coefficient ranks differ");
}

unsigned order(const MultiSeries& f) {
  unsigned best = f.degree_bound() + 1;
  for (const auto& [m, c] : f.coeffs()) best = std::min(best, total_degree(m));
  return best;
}

TruncatedSeries mul_capped(const TruncatedSeries& a, const TruncatedSeries& b, const ExtValue& cap) {
  ExtValue p = min(min(a.prec() + b.valuation_lower_bound(), b.prec() + a.valuation_lower_bound()),
                   a.prec() + b.prec());
  p = min(p, cap);
  return TruncatedSeries(HahnSeries::mul_below(a.approx(), b.approx(), p), p);
}

MultiIndex add_index(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

}  // namespace

unsigned total_degree(const MultiIndex& m) { return std::accumulate(m.begin(), m.end(), 0u); }

MultiSeries::MultiSeries(std::size_t nvars, unsigned degree_bound, bool truncated_tail,
                         std::size_t rank)
    : nvars_(nvars), rank_(rank), degree_bound_(degree_bound), truncated_(truncated_tail) {}

MultiSeries MultiSeries::constant(const TruncatedSeries& c, std::size_t nvars, unsigned degree_bound) {
  MultiSeries f(nvars, degree_bound, false, c.rank());
  f.add_term(MultiIndex(nvars, 0), c);
  return f;
}

MultiSeries MultiSeries::variable(std::size_t i, std::size_t nvars, unsigned degree_bound,
                                  std::size_t rank) {
  if (i >= nvars) throw Error(ErrorKind::InvalidArgument, "variable index out of range");
  MultiSeries f(nvars, std::max(degree_bound, 1u), false, rank);
  MultiIndex m(nvars, 0);
  m[i] = 1;
  f.add_term(m, TruncatedSeries::constant(1, rank));
  return f;
}

MultiSeries MultiSeries::monomial(const TruncatedSeries& c, const MultiIndex& m, unsigned degree_bound) {
  MultiSeries f(m.size(), degree_bound, false, c.rank());
  f.add_term(m, c);
  return f;
}

unsigned MultiSeries::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : coeffs_) d = std::max(d, total_degree(m));
  return d;
}

TruncatedSeries MultiSeries::coeff(const MultiIndex& m) const {
  auto it = coeffs_.find(m);
  if (it == coeffs_.end()) return TruncatedSeries(HahnSeries(rank_));
  return it->second;
}

void MultiSeries::add_term(const MultiIndex& m, const TruncatedSeries& c) {
  if (m.size() != nvars_) throw Error(ErrorKind::InvalidArgument, "multi-index has wrong length");
  if (c.rank() != rank_) throw Error(ErrorKind::RankMismatch, "coefficient rank differs");
  if (total_degree(m) > degree_bound_) return;
  auto it = coeffs_.find(m);
  if (it == coeffs_.end()) {
    if (!c.is_exact_zero()) coeffs_.emplace(m, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_exact_zero()) coeffs_.erase(it);
}

MultiSeries MultiSeries::with_degree_bound(unsigned D) const {
  MultiSeries f(nvars_, D, truncated_, rank_);
  for (const auto& [m, c] : coeffs_) {
    if (total_degree(m) <= D)
      f.coeffs_.emplace(m, c);
    else
      f.truncated_ = true;
  }
  if (truncated_ && D > degree_bound_) f.degree_bound_ = degree_bound_;
  return f;
}

MultiSeries MultiSeries::with_coeff_prec(const ExtValue& p) const {
  MultiSeries f(nvars_, degree_bound_, truncated_, rank_);
  for (const auto& [m, c] : coeffs_) {
    auto t = c.with_prec(p);
    if (!t.is_exact_zero()) f.coeffs_.emplace(m, std::move(t));
  }
  return f;
}

MultiSeries MultiSeries::scaled(const TruncatedSeries& s) const {
  MultiSeries f(nvars_, degree_bound_, truncated_, rank_);
  for (const auto& [m, c] : coeffs_) f.add_term(m, c * s);
  return f;
}

MultiSeries MultiSeries::shifted(const GroupElement& g) const {
  MultiSeries f(nvars_, degree_bound_, truncated_, rank_);
  for (const auto& [m, c] : coeffs_) f.coeffs_.emplace(m, c.shifted(g));
  return f;
}

MultiSeries MultiSeries::remap(std::size_t new_nvars, const std::vector<std::size_t>& map) const {
  if (map.size() != nvars_) throw Error(ErrorKind::InvalidArgument, "variable map has wrong length");
  MultiSeries f(new_nvars, degree_bound_, truncated_, rank_);
  for (const auto& [m, c] : coeffs_) {
    MultiIndex n(new_nvars, 0);
    for (std::size_t i = 0; i < nvars_; ++i) n.at(map[i]) += m[i];
    f.add_term(n, c);
  }
  return f;
}

MultiSeries MultiSeries::operator-() const {
  MultiSeries f(*this);
  for (auto& [m, c] : f.coeffs_) c = -c;
  return f;
}

namespace {

unsigned sum_bound(const MultiSeries& a, const MultiSeries& b) {
  if (a.truncated_tail() && b.truncated_tail()) return std::min(a.degree_bound(), b.degree_bound());
  if (a.truncated_tail()) return a.degree_bound();
  if (b.truncated_tail()) return b.degree_bound();
  return std::max(a.degree_bound(), b.degree_bound());
}

}  // namespace

MultiSeries operator+(const MultiSeries& a, const MultiSeries& b) {
  require_compatible(a, b);
  MultiSeries f(a.nvars_, sum_bound(a, b), a.truncated_ || b.truncated_, a.rank_);
  for (const auto& [m, c] : a.coeffs_) f.add_term(m, c);
  for (const auto& [m, c] : b.coeffs_) f.add_term(m, c);
  return f;
}

MultiSeries operator-(const MultiSeries& a, const MultiSeries& b) { return a + (-b); }

MultiSeries MultiSeries::mul(const MultiSeries& a, const MultiSeries& b, unsigned D,
                             const ExtValue& prec) {
  require_compatible(a, b);
  unsigned natural = a.degree_bound_ + b.degree_bound_;
  if (a.truncated_) natural = std::min(natural, a.degree_bound_ + order(b));
  if (b.truncated_) natural = std::min(natural, b.degree_bound_ + order(a));
  bool truncated = a.truncated_ || b.truncated_ || D < natural;
  MultiSeries f(a.nvars_, std::min(D, natural), truncated, a.rank_);
  for (const auto& [ma, ca] : a.coeffs_) {
    unsigned da = total_degree(ma);
    if (da > f.degree_bound_) continue;
    for (const auto& [mb, cb] : b.coeffs_) {
      if (da + total_degree(mb) > f.degree_bound_) continue;
      f.add_term(add_index(ma, mb), mul_capped(ca, cb, prec));
    }
  }
  return f;
}

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
  return MultiSeries::mul(a, b, a.degree_bound_ + b.degree_bound_);
}

bool operator==(const MultiSeries& a, const MultiSeries& b) {
  return a.nvars_ == b.nvars_ && a.rank_ == b.rank_ && a.degree_bound_ == b.degree_bound_ &&
         a.truncated_ == b.truncated_ && a.coeffs_ == b.coeffs_;
}

bool MultiSeries::in_ideal(unsigned D, const ExtValue& prec) const {
  if (truncated_ && degree_bound_ < D) return false;
  for (const auto& [m, c] : coeffs_) {
    if (total_degree(m) > D) continue;
    if (c.prec() < prec) return false;
    if (!c.approx().truncated_below(prec).is_zero()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::string to_string(const MultiSeries& f) {
  std::string out;
  for (auto it = f.coeffs().rbegin(); it != f.coeffs().rend(); ++it) {
    if (!out.empty()) out += " + ";
    out += "[" + to_string(it->second) + "]";
    for (std::size_t i = 0; i < it->first.size(); ++i) {
      unsigned e = it->first[i];
      if (e == 0) continue;
      out += "*x" + std::to_string(i + 1);
      if (e > 1) out += "^" + std::to_string(e);
    }
  }
  if (out.empty()) out = "0";
  if (f.truncated_tail()) out += " + O(deg " + std::to_string(f.degree_bound() + 1) + ")";
  return out;
}

namespace {

class MultiParser {
 public:
  MultiParser(const std::string& text, std::size_t nvars, std::size_t rank)
      : s_(text), nvars_(nvars), rank_(rank) {}

  MultiSeries parse() {
    std::vector<std::pair<MultiIndex, TruncatedSeries>> terms;
    bool truncated = false;
    unsigned bound = 0;
    skip_ws();
    if (s_.compare(pos_, std::string::npos, "0") == 0) return MultiSeries(nvars_, 0, false, rank_);
    while (true) {
      skip_ws();
      if (s_.compare(pos_, 2, "O(") == 0) {
        pos_ += 2;
        skip_ws();
        expect("deg");
        skip_ws();
        unsigned n = number();
        if (n == 0) fail("degree bound in O(deg N) must be positive");
        skip_ws();
        expect(")");
        truncated = true;
        bound = n - 1;
        skip_ws();
        if (pos_ != s_.size()) fail("O(deg N) must be the last term");
        break;
      }
      terms.push_back(term());
      skip_ws();
      if (pos_ == s_.size()) break;
      expect("+");
    }
    unsigned deg = 0;
    for (const auto& [m, c] : terms) deg = std::max(deg, total_degree(m));
    if (truncated && deg > bound) fail("term above the stated degree bound");
    MultiSeries f(nvars_, truncated ? bound : deg, truncated, rank_);
    for (const auto& [m, c] : terms) f.add_term(m, c);
    return f;
  }

 private:
  std::pair<MultiIndex, TruncatedSeries> term() {
    TruncatedSeries c = TruncatedSeries::constant(1, rank_);
    MultiIndex m(nvars_, 0);
    bool need_factor = true;
    if (peek() == '[') {
      std::size_t close = s_.find(']', pos_);
      if (close == std::string::npos) fail("unterminated coefficient bracket");
      try {
        c = parse_series(s_.substr(pos_ + 1, close - pos_ - 1), rank_);
      } catch (const Error& e) {
        fail(std::string("bad coefficient: ") + e.what());
      }
      pos_ = close + 1;
      need_factor = false;
      skip_ws();
      if (peek() != '*') return {m, c};
      ++pos_;
      skip_ws();
    }
    do {
      if (!need_factor) {
        skip_ws();
      }
      if (peek() != 'x') fail("expected a variable x<i>");
      ++pos_;
      unsigned idx = number();
      if (idx == 0 || idx > nvars_) fail("variable index out of range");
      unsigned e = 1;
      if (peek() == '^') {
        ++pos_;
        e = number();
      }
      m[idx - 1] += e;
      need_factor = false;
      skip_ws();
    } while (peek() == '*' && (++pos_, true));
    return {m, c};
  }

  unsigned number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    return static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start)));
  }

  void expect(const std::string& tok) {
    if (s_.compare(pos_, tok.size(), tok) != 0) fail("expected '" + tok + "'");
    pos_ += tok.size();
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::SyntaxError, msg + " at column " + std::to_string(pos_ + 1));
  }

  const std::string& s_;
  std::size_t nvars_, rank_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiSeries parse_multiseries(const std::string& text, std::size_t nvars, std::size_t rank) {
  return MultiParser(text, nvars, rank).parse();
}

// ---------------------------------------------------------------------------

GaussData gauss_data(const MultiSeries& f) {
  if (f.is_zero()) throw Error(ErrorKind::InvalidArgument, "Gauss norm of the zero series");
  std::optional<GroupElement> norm;
  for (const auto& [m, c] : f.coeffs())
    if (!c.approx().is_zero() && (!norm || c.approx().valuation() < *norm)) norm = c.approx().valuation();
  if (!norm) throw Error(ErrorKind::InsufficientPrecision, "no coefficient has a determined leading term");
  for (const auto& [m, c] : f.coeffs())
    if (c.approx().is_zero() && (!norm || !(c.prec() > ExtValue(*norm))))
      throw Error(ErrorKind::InsufficientPrecision,
                  "a coefficient is undetermined below " + c.prec().to_string());
  GaussData g{*norm, MultiSeries(f.nvars(), f.degree_bound(), f.truncated_tail(), f.rank())};
  for (const auto& [m, c] : f.coeffs()) {
    Rational q = c.approx().coeff_at(*norm);
    if (sgn(q) != 0) g.top.add_term(m, TruncatedSeries::constant(q, f.rank()));
  }
  return g;
}

unsigned regular_degree(const MultiSeries& f, std::size_t var) {
  if (var >= f.nvars()) throw Error(ErrorKind::InvalidArgument, "variable index out of range");
  if (f.is_zero()) throw Error(ErrorKind::NormNotOne, "the zero series has no unit norm");
  auto g = gauss_data(f);
  if (!g.norm.is_zero())
    throw Error(ErrorKind::NormNotOne, "Gauss norm is t^(" + g.norm.to_string() + "), not 1");
  std::optional<unsigned> best;
  for (const auto& [m, c] : g.top.coeffs()) {
    bool axis = true;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (i != var && m[i] != 0) axis = false;
    if (axis && (!best || m[var] < *best)) best = m[var];
  }
  if (!best)
    throw Error(ErrorKind::NotRegular, "top slice vanishes on the x" + std::to_string(var + 1) +
                                           "-axis up to degree " + std::to_string(f.degree_bound()));
  return *best;
}

MultiSeries recenter_rescale(const MultiSeries& f, const std::vector<Rational>& a, const Rational& r) {
  if (a.size() != f.nvars()) throw Error(ErrorKind::InvalidArgument, "shift vector has wrong length");
  if (sgn(r) <= 0) throw Error(ErrorKind::InvalidArgument, "scale must be positive");
  MultiSeries out(f.nvars(), f.degree_bound(), f.truncated_tail(), f.rank());
  for (const auto& [m, c] : f.coeffs()) {
    // Expand prod_i (r x_i + a_i)^{m_i} variable by variable.
    std::vector<std::pair<MultiIndex, Rational>> acc{{MultiIndex(f.nvars(), 0), Rational(1)}};
    for (std::size_t i = 0; i < f.nvars(); ++i) {
      if (m[i] == 0) continue;
      std::vector<std::pair<MultiIndex, Rational>> next;
      for (unsigned k = 0; k <= m[i]; ++k) {
        Integer binom;
        mpz_bin_uiui(binom.get_mpz_t(), m[i], k);
        Rational rk, ak;
        mpq_class base_r(r), base_a(a[i]);
        rk = 1;
        ak = 1;
        for (unsigned j = 0; j < k; ++j) rk *= base_r;
        for (unsigned j = k; j < m[i]; ++j) ak *= base_a;
        Rational w = Rational(binom) * rk * ak;
        if (sgn(w) == 0) continue;
        for (const auto& [idx, q] : acc) {
          MultiIndex n = idx;
          n[i] += k;
          next.emplace_back(std::move(n), q * w);
        }
      }
      acc = std::move(next);
    }
    for (const auto& [idx, q] : acc) out.add_term(idx, c.scaled(q));
  }
  return out;
}

MultiSeries derivative(const MultiSeries& f, std::size_t var) {
  if (var >= f.nvars()) throw Error(ErrorKind::InvalidArgument, "variable index out of range");
  unsigned D = f.degree_bound() > 0 ? f.degree_bound() - 1 : 0;
  MultiSeries out(f.nvars(), D, f.truncated_tail(), f.rank());
  for (const auto& [m, c] : f.coeffs()) {
    if (m[var] == 0) continue;
    MultiIndex n = m;
    --n[var];
    out.add_term(n, c.scaled(Rational(m[var])));
  }
  return out;
}

MultiSeries substitute(const MultiSeries& f, std::size_t var, const MultiSeries& h, unsigned D) {
  require_compatible(f, h);
  if (var >= f.nvars()) throw Error(ErrorKind::InvalidArgument, "variable index out of range");
  unsigned bound = D;
  if (f.truncated_tail()) bound = std::min(bound, f.degree_bound());
  if (h.truncated_tail()) bound = std::min(bound, h.degree_bound());
  const MultiIndex zero(f.nvars(), 0);
  TruncatedSeries h0 = h.coeff(zero);

  std::vector<MultiSeries> powers{MultiSeries::constant(TruncatedSeries::constant(1, f.rank()),
                                                        f.nvars(), bound)};
  MultiSeries out(f.nvars(), bound, f.truncated_tail() || h.truncated_tail() || bound < D, f.rank());
  for (const auto& [m, c] : f.coeffs()) {
    while (powers.size() <= m[var]) powers.push_back(MultiSeries::mul(powers.back(), h, bound));
    MultiIndex rest = m;
    rest[var] = 0;
    unsigned dr = total_degree(rest);
    if (dr > bound) continue;
    for (const auto& [mp, cp] : powers[m[var]].coeffs()) {
      if (dr + total_degree(mp) > bound) continue;
      out.add_term(add_index(rest, mp), c * cp);
    }
  }
  if (f.truncated_tail() && !h0.is_exact_zero()) {
    // Unknown monomials x^a y^k of f with a + k > D_f land in degree a with
    // valuation at least k v(h0), assuming tail coefficients lie in the
    // valuation ring.
    if (h0.approx().is_zero() || h0.approx().valuation().sign() <= 0)
      throw Error(ErrorKind::InsufficientPrecision,
                  "substituting a non-infinitesimal constant into a truncated series");
    GroupElement v = h0.approx().valuation();
    MultiSeries capped(f.nvars(), out.degree_bound(), true, f.rank());
    for (const auto& [m, c] : out.coeffs()) {
      unsigned a = total_degree(m);
      capped.add_term(m, c.with_prec(ExtValue(v.scaled(Rational(f.degree_bound() + 1 - a)))));
    }
    return capped;
  }
  return out;
}

TruncatedSeries evaluate(const MultiSeries& f, const std::vector<TruncatedSeries>& point,
                         const ExtValue& cap) {
  if (point.size() != f.nvars()) throw Error(ErrorKind::InvalidArgument, "point has wrong dimension");
  ExtValue p = cap;
  if (f.truncated_tail()) {
    std::optional<GroupElement> vmin;
    for (const auto& a : point) {
      if (a.is_exact_zero()) continue;
      if (a.approx().is_zero() || a.approx().valuation().sign() <= 0)
        throw Error(ErrorKind::NotInfinitesimal,
                    "a truncated series can only be evaluated at infinitesimal points");
      if (!vmin || a.approx().valuation() < *vmin) vmin = a.approx().valuation();
    }
    if (vmin) p = min(p, ExtValue(vmin->scaled(Rational(f.degree_bound() + 1))));
  }
  std::vector<std::vector<TruncatedSeries>> powers(f.nvars());
  for (std::size_t i = 0; i < f.nvars(); ++i)
    powers[i].push_back(TruncatedSeries::constant(1, f.rank()));
  TruncatedSeries sum(HahnSeries(f.rank()), p);
  for (const auto& [m, c] : f.coeffs()) {
    TruncatedSeries term = c.with_prec(p);
    for (std::size_t i = 0; i < f.nvars(); ++i) {
      while (powers[i].size() <= m[i]) powers[i].push_back(mul_capped(powers[i].back(), point[i], p));
      if (m[i] > 0) term = mul_capped(term, powers[i][m[i]], p);
    }
    sum = sum + term;
  }
  return sum;
}

StrongSplit strong_split(const MultiSeries& f) {
  if (f.nvars() < 2) throw Error(ErrorKind::InvalidArgument, "strong_split needs variables (xi, eta1, eta2)");
  const std::size_t m = f.nvars() - 2;
  const unsigned D = f.degree_bound();
  StrongSplit out{MultiSeries(m + 2, D, f.truncated_tail(), f.rank()),
                  MultiSeries(m + 2, D, f.truncated_tail(), f.rank()),
                  MultiSeries(m + 3, D, f.truncated_tail(), f.rank())};
  for (const auto& [idx, c] : f.coeffs()) {
    const unsigned i = idx[m], j = idx[m + 1], k = std::min(i, j);
    MultiIndex xi(idx.begin(), idx.begin() + static_cast<long>(m));
    // eta1^i eta2^j = eta1^(i-k) eta2^(j-k) [eta3^k + (eta1 eta2 - eta3) sum_l (eta1 eta2)^l eta3^(k-1-l)]
    MultiIndex rem = xi;
    if (j == k) {
      rem.push_back(i - k);
      rem.push_back(k);
      out.f1.add_term(rem, c);
    } else {
      rem.push_back(j - k - 1);
      rem.push_back(k);
      out.f2.add_term(rem, c);
    }
    for (unsigned l = 0; l < k; ++l) {
      MultiIndex q = xi;
      q.push_back(i - k + l);
      q.push_back(j - k + l);
      q.push_back(k - 1 - l);
      out.Q.add_term(q, c);
    }
  }
  return out;
}

}  // namespace hahn
