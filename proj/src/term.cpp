#include "hahn/term.hpp"

#include <algorithm>
#include <cctype>

#include "hahn/error.hpp"

namespace hahn {

bool Term::operator==(const Term& o) const {
  if (kind != o.kind || args.size() != o.args.size()) return false;
  switch (kind) {
    case Kind::Literal:
      if (literal != o.literal) return false;
      break;
    case Kind::Monomial:
      if (exp != o.exp) return false;
      break;
    case Kind::Pow:
      if (power != o.power) return false;
      break;
    case Kind::Apply:
      if (function != o.function) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < args.size(); ++i)
    if (!(*args[i] == *o.args[i])) return false;
  return true;
}

namespace {

TermPtr make(Term::Kind k, std::vector<TermPtr> args = {}) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->args = std::move(args);
  return t;
}

class Parser {
 public:
  Parser(const std::string& s, const FunctionRegistry& reg, std::size_t rank) : s_(s), reg_(reg), rank_(rank) {}

  TermPtr parse() {
    TermPtr t = sum();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::SyntaxError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
  }
  [[noreturn]] void fail(const std::string& what) const { fail(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool digit_at(std::size_t i) const { return i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i])); }

  std::string digits() {
    std::size_t start = pos_;
    while (digit_at(pos_)) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  TermPtr sum() {
    TermPtr t = prod();
    while (peek('+') || peek('-')) {
      auto k = s_[pos_++] == '+' ? Term::Kind::Add : Term::Kind::Sub;
      t = make(k, {t, prod()});
    }
    return t;
  }

  TermPtr prod() {
    TermPtr t = unary();
    while (peek('*') || peek('/')) {
      auto k = s_[pos_++] == '*' ? Term::Kind::Mul : Term::Kind::Div;
      t = make(k, {t, unary()});
    }
    return t;
  }

  TermPtr unary() {
    if (peek('-')) {
      ++pos_;
      return make(Term::Kind::Neg, {unary()});
    }
    return atom();
  }

  TermPtr atom() {
    TermPtr t = base();
    while (peek('^')) {
      ++pos_;
      skip();
      bool neg = false;
      if (pos_ < s_.size() && s_[pos_] == '-') {
        neg = true;
        ++pos_;
      }
      if (!digit_at(pos_)) fail("expected an integer exponent");
      std::string d = digits();
      if (d.size() > 9) fail("exponent too large");
      auto p = make(Term::Kind::Pow, {t});
      std::const_pointer_cast<Term>(p)->power = neg ? -std::stol(d) : std::stol(d);
      t = p;
    }
    return t;
  }

  TermPtr base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const std::size_t start = pos_;
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string text = digits();
      if (pos_ + 1 < s_.size() && s_[pos_] == '/' && digit_at(pos_ + 1)) {
        ++pos_;
        text += "/" + digits();
      }
      Rational q = parse_rational(text);
      if (sgn(q.get_den()) == 0) fail("zero denominator", start);
      auto t = make(Term::Kind::Literal);
      std::const_pointer_cast<Term>(t)->literal = q;
      return t;
    }
    if (c == '(') {
      ++pos_;
      TermPtr t = sum();
      expect(')');
      return t;
    }
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail("unexpected '" + std::string(1, c) + "'");
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (name == "t") {
      if (s_.compare(pos_, 2, "^(") != 0) fail("expected '^(' after t");
      pos_ += 2;
      std::size_t close = s_.find(')', pos_);
      if (close == std::string::npos) fail("expected ')'", s_.size());
      GroupElement e;
      try {
        e = parse_group_element(s_.substr(pos_, close - pos_), rank_);
      } catch (const Error& err) {
        fail(std::string("bad exponent: ") + err.what());
      }
      pos_ = close + 1;
      auto t = make(Term::Kind::Monomial);
      std::const_pointer_cast<Term>(t)->exp = e;
      return t;
    }
    if (name == "x") {
      if (peek('(')) fail("x is not a function");
      return make(Term::Kind::Var);
    }
    std::size_t arity;
    if (name == "inv") {
      arity = 1;
    } else {
      const AnalyticFunction* f = reg_.find(name);
      if (!f) throw Error(ErrorKind::UnknownFunction, "unknown function '" + name + "'");
      arity = f->nvars;
    }
    expect('(');
    std::vector<TermPtr> args{sum()};
    while (peek(',')) {
      ++pos_;
      args.push_back(sum());
    }
    expect(')');
    if (args.size() != arity)
      throw Error(ErrorKind::ArityMismatch, name + " takes " + std::to_string(arity) + " arguments, got " +
                                                std::to_string(args.size()));
    if (name == "inv") return make(Term::Kind::Inv, std::move(args));
    auto t = make(Term::Kind::Apply, std::move(args));
    std::const_pointer_cast<Term>(t)->function = name;
    return t;
  }

  const std::string& s_;
  const FunctionRegistry& reg_;
  std::size_t rank_;
  std::size_t pos_ = 0;
};

int precedence(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Add:
    case Term::Kind::Sub:
      return 1;
    case Term::Kind::Mul:
    case Term::Kind::Div:
      return 2;
    case Term::Kind::Neg:
      return 3;
    case Term::Kind::Pow:
      return 4;
    case Term::Kind::Literal:
      return sgn(t.literal) < 0 ? 3 : 5;
    default:
      return 5;
  }
}

std::string wrap(const Term& t, bool paren) { return paren ? "(" + print_term(t) + ")" : print_term(t); }

}  // namespace

TermPtr parse_term(const std::string& text, const FunctionRegistry& registry, std::size_t rank) {
  return Parser(text, registry, rank).parse();
}

std::string print_term(const Term& t) {
  const int p = precedence(t);
  switch (t.kind) {
    case Term::Kind::Literal:
      return to_string(t.literal);
    case Term::Kind::Monomial:
      return "t^(" + t.exp.to_string() + ")";
    case Term::Kind::Var:
      return "x";
    case Term::Kind::Add:
    case Term::Kind::Sub:
    case Term::Kind::Mul:
    case Term::Kind::Div: {
      static const char* ops[] = {" + ", " - ", " * ", " / "};
      const char* op = ops[static_cast<int>(t.kind) - static_cast<int>(Term::Kind::Add)];
      return wrap(*t.args[0], precedence(*t.args[0]) < p) + op + wrap(*t.args[1], precedence(*t.args[1]) <= p);
    }
    case Term::Kind::Neg:
      return "-" + wrap(*t.args[0], precedence(*t.args[0]) < 3);
    case Term::Kind::Pow:
      return wrap(*t.args[0], precedence(*t.args[0]) < 4) + "^" + std::to_string(t.power);
    case Term::Kind::Inv:
      return "inv(" + print_term(*t.args[0]) + ")";
    case Term::Kind::Apply: {
      std::string out = t.function + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) out += (i ? ", " : "") + print_term(*t.args[i]);
      return out + ")";
    }
  }
  return {};
}

// ---------------------------------------------------------------------------

namespace {

struct Evaluator {
  const TruncatedSeries& x;
  const ExtValue cap;
  const FunctionRegistry& reg;
  const EvalOptions& opt;

  TruncatedSeries capped(const TruncatedSeries& v) const { return v.is_exact() ? v : v.with_prec(cap); }

  TruncatedSeries reciprocal(const TruncatedSeries& b) const {
    if (b.is_exact_zero()) {
      if (opt.inv_zero_is_zero) return TruncatedSeries(HahnSeries(x.rank()));
      throw Error(ErrorKind::DivisionByZero, "division by an exact zero");
    }
    if (b.approx().is_zero())
      throw Error(ErrorKind::InsufficientPrecision, "denominator not determined at precision " + b.prec().to_string());
    return invert(b, cap.value());
  }

  TruncatedSeries operator()(const Term& t) const {
    using K = Term::Kind;
    switch (t.kind) {
      case K::Literal:
        return TruncatedSeries::constant(t.literal, x.rank());
      case K::Monomial:
        if (t.exp.rank() != x.rank()) throw Error(ErrorKind::RankMismatch, "monomial rank differs from x");
        return TruncatedSeries::monomial(1, t.exp);
      case K::Var:
        return x;
      case K::Add:
        return capped((*this)(*t.args[0]) + (*this)(*t.args[1]));
      case K::Sub:
        return capped((*this)(*t.args[0]) - (*this)(*t.args[1]));
      case K::Mul:
        return capped((*this)(*t.args[0]) * (*this)(*t.args[1]));
      case K::Div: {
        TruncatedSeries a = (*this)(*t.args[0]);
        return capped(a * reciprocal((*this)(*t.args[1])));
      }
      case K::Neg:
        return -(*this)(*t.args[0]);
      case K::Inv:
        return reciprocal((*this)(*t.args[0]));
      case K::Pow: {
        TruncatedSeries b = (*this)(*t.args[0]);
        if (t.power < 0) b = reciprocal(b);
        return power(b, static_cast<unsigned>(std::labs(t.power)), b.is_exact() ? ExtValue::infinity(b.rank()) : cap);
      }
      case K::Apply: {
        const AnalyticFunction* f = reg.find(t.function);
        if (!f) throw Error(ErrorKind::UnknownFunction, "unknown function '" + t.function + "'");
        std::vector<TruncatedSeries> args;
        for (const auto& a : t.args) args.push_back((*this)(*a));
        try {
          return evaluate_analytic(*f, args, cap.value());
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::NotInfinitesimal) throw Error(ErrorKind::DomainError, e.what());
          throw;
        }
      }
    }
    throw Error(ErrorKind::InvalidArgument, "bad term");
  }
};

}  // namespace

TruncatedSeries eval_term(const Term& t, const TruncatedSeries& x, const GroupElement& target,
                          const FunctionRegistry& registry, const EvalOptions& opt) {
  if (x.rank() != target.rank()) throw Error(ErrorKind::RankMismatch, "x and precision ranks differ");
  GroupElement work = target;
  std::optional<ExtValue> best;
  for (int k = 0; k < 8; ++k) {
    TruncatedSeries v(x.rank());
    try {
      v = Evaluator{x, ExtValue(work), registry, opt}(t);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientPrecision && e.kind() != ErrorKind::ZeroOrUncertainLeadingTerm)
        throw;
      work += GroupElement::scalar(Rational(2 << k), x.rank());
      continue;
    }
    if (v.is_exact()) return v;
    if (!(v.prec() < ExtValue(target))) return v.with_prec(target);
    // Precision limited by the input itself: more work does not help.
    if (best && !(*best < v.prec())) return v;
    best = v.prec();
    // Lost precision to negative valuations on the way; ask for that much more.
    work += (target - v.prec().value()) + GroupElement::scalar(1, x.rank());
  }
  throw Error(ErrorKind::InsufficientPrecision, "could not reach precision " + target.to_string());
}

Evaluable term_evaluable(TermPtr t, const FunctionRegistry& registry, const EvalOptions& opt) {
  return [t = std::move(t), &registry, opt](const TruncatedSeries& x, const GroupElement& target) {
    return eval_term(*t, x, target, registry, opt);
  };
}

std::optional<SeriesPoly> as_polynomial(const Term& t, std::size_t rank) {
  using K = Term::Kind;
  auto add = [](SeriesPoly a, const SeriesPoly& b, int sign) {
    if (a.size() < b.size()) a.resize(b.size(), TruncatedSeries(b[0].rank()));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = sign > 0 ? a[i] + b[i] : a[i] - b[i];
    return a;
  };
  auto mul = [](const SeriesPoly& a, const SeriesPoly& b) {
    SeriesPoly out(a.size() + b.size() - 1, TruncatedSeries(a[0].rank()));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
    return out;
  };
  switch (t.kind) {
    case K::Literal:
      return SeriesPoly{TruncatedSeries::constant(t.literal, rank)};
    case K::Monomial:
      return SeriesPoly{TruncatedSeries::monomial(1, t.exp)};
    case K::Var:
      return SeriesPoly{TruncatedSeries::constant(0, rank), TruncatedSeries::constant(1, rank)};
    case K::Add:
    case K::Sub:
    case K::Mul: {
      auto a = as_polynomial(*t.args[0], rank), b = as_polynomial(*t.args[1], rank);
      if (!a || !b) return std::nullopt;
      if (t.kind == K::Mul) return mul(*a, *b);
      return add(*a, *b, t.kind == K::Add ? 1 : -1);
    }
    case K::Neg: {
      auto a = as_polynomial(*t.args[0], rank);
      if (!a) return std::nullopt;
      for (auto& c : *a) c = -c;
      return a;
    }
    case K::Div: {
      // Division by a nonzero monomial constant keeps coefficients finite.
      auto a = as_polynomial(*t.args[0], rank), b = as_polynomial(*t.args[1], rank);
      if (!a || !b || b->size() != 1 || b->front().approx().size() != 1) return std::nullopt;
      auto inv = invert(b->front(), GroupElement(b->front().rank()));
      for (auto& c : *a) c = c * inv;
      return a;
    }
    case K::Pow: {
      if (t.power < 0) return std::nullopt;
      auto a = as_polynomial(*t.args[0], rank);
      if (!a) return std::nullopt;
      SeriesPoly out{TruncatedSeries::constant(1, a->front().rank())};
      for (long k = 0; k < t.power; ++k) out = mul(out, *a);
      return out;
    }
    default:
      return std::nullopt;
  }
}

namespace {

bool mentions_x(const Term& t) {
  if (t.kind == Term::Kind::Var) return true;
  return std::any_of(t.args.begin(), t.args.end(), [](const TermPtr& a) { return mentions_x(*a); });
}

using Fraction = std::pair<SeriesPoly, SeriesPoly>;

SeriesPoly poly_mul(const SeriesPoly& a, const SeriesPoly& b) {
  SeriesPoly out(a.size() + b.size() - 1, TruncatedSeries(a[0].rank()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  return out;
}

SeriesPoly poly_add(SeriesPoly a, const SeriesPoly& b, int sign) {
  if (a.size() < b.size()) a.resize(b.size(), TruncatedSeries(b[0].rank()));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = sign > 0 ? a[i] + b[i] : a[i] - b[i];
  return a;
}

bool poly_is_zero(const SeriesPoly& p) {
  return std::all_of(p.begin(), p.end(), [](const TruncatedSeries& c) { return c.is_exact_zero(); });
}

SeriesPoly poly_pow(const SeriesPoly& p, long k) {
  SeriesPoly out{TruncatedSeries::constant(1, p[0].rank())};
  for (long i = 0; i < k; ++i) out = poly_mul(out, p);
  return out;
}

// The term as numerator / denominator, if no analytic function occurs.
std::optional<Fraction> as_fraction(const Term& t, std::size_t rank) {
  using K = Term::Kind;
  SeriesPoly one{TruncatedSeries::constant(1, rank)};
  switch (t.kind) {
    case K::Literal:
    case K::Monomial:
    case K::Var:
      return Fraction{*as_polynomial(t, rank), one};
    case K::Add:
    case K::Sub:
    case K::Mul:
    case K::Div: {
      auto a = as_fraction(*t.args[0], rank), b = as_fraction(*t.args[1], rank);
      if (!a || !b) return std::nullopt;
      if (t.kind == K::Mul) return Fraction{poly_mul(a->first, b->first), poly_mul(a->second, b->second)};
      if (t.kind == K::Div) {
        if (poly_is_zero(b->first)) return std::nullopt;
        return Fraction{poly_mul(a->first, b->second), poly_mul(a->second, b->first)};
      }
      return Fraction{poly_add(poly_mul(a->first, b->second), poly_mul(b->first, a->second), t.kind == K::Add ? 1 : -1),
                      poly_mul(a->second, b->second)};
    }
    case K::Neg: {
      auto a = as_fraction(*t.args[0], rank);
      if (!a) return std::nullopt;
      for (auto& c : a->first) c = -c;
      return a;
    }
    case K::Inv: {
      auto a = as_fraction(*t.args[0], rank);
      if (!a || poly_is_zero(a->first)) return std::nullopt;
      return Fraction{a->second, a->first};
    }
    case K::Pow: {
      auto a = as_fraction(*t.args[0], rank);
      if (!a) return std::nullopt;
      if (t.power >= 0) return Fraction{poly_pow(a->first, t.power), poly_pow(a->second, t.power)};
      if (poly_is_zero(a->first)) return std::nullopt;
      return Fraction{poly_pow(a->second, -t.power), poly_pow(a->first, -t.power)};
    }
    default:
      return std::nullopt;
  }
}

// Numerators and denominators of the maximal rational subterms that depend
// on x.
void polynomial_pieces(const Term& t, std::size_t rank, std::vector<SeriesPoly>& out) {
  if (!mentions_x(t)) return;
  if (auto f = as_fraction(t, rank)) {
    out.push_back(f->first);
    out.push_back(f->second);
    return;
  }
  for (const auto& a : t.args) polynomial_pieces(*a, rank, out);
}

}  // namespace

PreparedTerm prepare_term(const TermPtr& t, const GroupElement& lambda, const FunctionRegistry& registry,
                          const PrepareTermOptions& opt) {
  if (lambda.sign() < 0) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
  std::vector<SeriesPoly> pieces;
  polynomial_pieces(*t, lambda.rank(), pieces);
  Evaluable f = term_evaluable(t, registry, opt.eval);
  GroupElement depth =
      GroupElement::scalar(opt.sampler.window_hi + lambda[0] + opt.sampler.extra_depth + 1, lambda.rank());
  VerificationReport last;
  for (int round = 0; round <= opt.budget; ++round) {
    PreparingSet set;
    auto add = [&](const PreparedPoint& p) {
      bool seen = std::any_of(set.points.begin(), set.points.end(),
                              [&](const PreparedPoint& o) { return o.series == p.series; });
      if (!seen) set.points.push_back(p);
    };
    for (const auto& p : pieces)
      for (const auto& pt : preparing_points(p, depth).points) add(pt);
    add({HahnSeries(lambda.rank()), ExtValue::infinity(lambda.rank()), "x", 0});
    last = verify_preparation(f, set.centers(), lambda, opt.trials, opt.seed, opt.sampler);
    if (last.passed()) return {set, last};
    depth += GroupElement::scalar(4, lambda.rank());
  }
  throw BudgetExhausted("no verified preparing set within " + std::to_string(opt.budget) + " deepening rounds",
                        last);
}

}  // namespace hahn
