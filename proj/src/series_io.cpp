#include <cctype>

#include "hahn/error.hpp"
#include "hahn/series.hpp"

namespace hahn {

namespace {

std::string monomial_text(const Rational& c, const GroupElement& e, bool leading) {
  std::string out;
  Rational mag = c;
  if (!leading) {
    out += sgn(c) < 0 ? " - " : " + ";
    mag = abs(c);
  }
  out += to_string(mag);
  if (!e.is_zero()) out += "*t^(" + e.to_string() + ")";
  return out;
}

class SeriesParser {
 public:
  SeriesParser(const std::string& text, std::size_t rank) : s_(text), rank_(rank) {}

  TruncatedSeries parse() {
    std::vector<SeriesTerm> terms;
    ExtValue prec = ExtValue::infinity(rank_);
    bool first = true;
    while (true) {
      skip_ws();
      int sign = 1;
      if (!first) {
        if (at_end()) break;
        char op = s_[pos_];
        if (op != '+' && op != '-') fail("expected '+' or '-'");
        sign = op == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      } else if (peek('-') || peek('+')) {
        sign = s_[pos_] == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      }
      first = false;
      if (peek('O')) {
        if (sign < 0) fail("O-term must be added");
        ++pos_;
        expect('(');
        GroupElement e = parse_monomial_exp();
        skip_ws();
        expect(')');
        prec = ExtValue(e);
        skip_ws();
        if (!at_end()) fail("O-term must come last");
        break;
      }
      terms.push_back(parse_term(sign));
    }
    return TruncatedSeries(HahnSeries::from_terms(std::move(terms), rank_), prec);
  }

 private:
  SeriesTerm parse_term(int sign) {
    skip_ws();
    if (peek('t')) return {parse_monomial_exp(), Rational(sign)};
    Rational c = parse_coeff();
    skip_ws();
    GroupElement e(rank_);
    if (peek('*')) {
      ++pos_;
      skip_ws();
      e = parse_monomial_exp();
    }
    return {e, c * sign};
  }

  // t^(exp)
  GroupElement parse_monomial_exp() {
    expect('t');
    skip_ws();
    expect('^');
    skip_ws();
    expect('(');
    std::size_t close = s_.find(')', pos_);
    if (close == std::string::npos) fail("unterminated exponent");
    std::string body = s_.substr(pos_, close - pos_);
    std::size_t at = pos_;
    pos_ = close + 1;
    try {
      return parse_group_element(body, rank_);
    } catch (const Error& e) {
      pos_ = at;
      fail(e.what());
    }
    return GroupElement(rank_);
  }

  Rational parse_coeff() {
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected coefficient");
    if (!at_end() && s_[pos_] == '/') {
      ++pos_;
      std::size_t dstart = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (dstart == pos_) fail("expected denominator");
    }
    return parse_rational(s_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  bool peek(char c) const { return !at_end() && s_[pos_] == c; }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::SyntaxError,
                "series '" + s_ + "' at column " + std::to_string(pos_ + 1) + ": " + why);
  }

  const std::string& s_;
  std::size_t rank_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const HahnSeries& s) {
  if (s.is_zero()) return "0";
  std::string out;
  bool leading = true;
  for (const auto& t : s.terms()) {
    out += monomial_text(t.coeff, t.exp, leading);
    leading = false;
  }
  return out;
}

std::string to_string(const TruncatedSeries& s) {
  std::string out = to_string(s.approx());
  if (!s.is_exact()) out += " + O(t^(" + s.prec().value().to_string() + "))";
  return out;
}

TruncatedSeries parse_series(const std::string& text, std::size_t rank) {
  return SeriesParser(text, rank).parse();
}

}  // namespace hahn
