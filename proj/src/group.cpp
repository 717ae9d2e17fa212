#include "hahn/group.hpp"

#include <cctype>

#include "hahn/error.hpp"

namespace hahn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::ZeroOrUncertainLeadingTerm: return "ZeroOrUncertainLeadingTerm";
    case ErrorKind::UndecidableAtPrecision: return "UndecidableAtPrecision";
    case ErrorKind::NotInValuationRing: return "NotInValuationRing";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::IrrationalRoot: return "IrrationalRoot";
    case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorKind::ZeroInverse: return "ZeroInverse";
    case ErrorKind::SingletonBall: return "SingletonBall";
    case ErrorKind::NormNotOne: return "NormNotOne";
    case ErrorKind::NotRegular: return "NotRegular";
    case ErrorKind::NonUnitNorm: return "NonUnitNorm";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::MalformedRule: return "MalformedRule";
    case ErrorKind::NotInfinitesimal: return "NotInfinitesimal";
    case ErrorKind::PrecisionStall: return "PrecisionStall";
    case ErrorKind::NotRegularDegreeOne: return "NotRegularDegreeOne";
    case ErrorKind::UndecidedSign: return "UndecidedSign";
    case ErrorKind::DepthExhausted: return "DepthExhausted";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return Error(ErrorKind::SyntaxError, "malformed rational '" + s + "'"); };
  if (s.empty()) throw bad();
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') ++i;
  std::size_t slash = s.find('/');
  auto digits = [&](std::size_t from, std::size_t to) {
    if (from >= to) return false;
    for (std::size_t k = from; k < to; ++k)
      if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
    return true;
  };
  if (slash == std::string::npos) {
    if (!digits(i, s.size())) throw bad();
  } else {
    if (!digits(i, slash) || !digits(slash + 1, s.size())) throw bad();
  }
  std::string clean = s[0] == '+' ? s.substr(1) : s;
  Rational q;
  if (q.set_str(clean, 10) != 0) throw bad();
  if (slash != std::string::npos && q.get_den() == 0) throw bad();
  if (slash != std::string::npos && Integer(s.substr(slash + 1)) == 0) throw bad();
  q.canonicalize();
  return q;
}

Integer floor(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

GroupElement GroupElement::scalar(const Rational& q, std::size_t rank) {
  GroupElement g(rank);
  g.coords_[0] = q;
  g.coords_[0].canonicalize();
  return g;
}

bool GroupElement::is_zero() const {
  for (const auto& c : coords_)
    if (sgn(c) != 0) return false;
  return true;
}

int GroupElement::sign() const {
  for (const auto& c : coords_)
    if (int s = sgn(c); s != 0) return s;
  return 0;
}

static void check_rank(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorKind::RankMismatch,
                "group ranks " + std::to_string(a) + " and " + std::to_string(b));
}

GroupElement& GroupElement::operator+=(const GroupElement& o) {
  check_rank(rank(), o.rank());
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
  return *this;
}

GroupElement& GroupElement::operator-=(const GroupElement& o) {
  check_rank(rank(), o.rank());
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
  return *this;
}

GroupElement GroupElement::operator-() const {
  GroupElement r(*this);
  for (auto& c : r.coords_) c = -c;
  return r;
}

GroupElement GroupElement::scaled(const Rational& q) const {
  GroupElement r(*this);
  for (auto& c : r.coords_) c *= q;
  return r;
}

std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) {
  check_rank(a.rank(), b.rank());
  for (std::size_t i = 0; i < a.coords_.size(); ++i) {
    int c = cmp(a.coords_[i], b.coords_[i]);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

bool operator==(const GroupElement& a, const GroupElement& b) {
  return (a <=> b) == std::strong_ordering::equal;
}

std::string GroupElement::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ',';
    out += hahn::to_string(coords_[i]);
  }
  return out;
}

GroupElement parse_group_element(const std::string& text, std::size_t rank) {
  std::vector<Rational> coords;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = text.find(',', start);
    std::string piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::string trimmed;
    for (char ch : piece)
      if (!std::isspace(static_cast<unsigned char>(ch))) trimmed += ch;
    coords.push_back(parse_rational(trimmed));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (coords.size() != rank)
    throw Error(ErrorKind::SyntaxError, "exponent '" + text + "' does not have rank " +
                                            std::to_string(rank));
  return GroupElement(std::move(coords));
}

const GroupElement& ExtValue::value() const {
  if (infinite_) throw Error(ErrorKind::InvalidArgument, "value() of infinity");
  return value_;
}

ExtValue operator+(const ExtValue& a, const ExtValue& b) {
  if (a.infinite_ || b.infinite_) return ExtValue::infinity(a.value_.rank());
  return ExtValue(a.value_ + b.value_);
}

ExtValue operator+(const ExtValue& a, const GroupElement& b) {
  if (a.infinite_) return a;
  return ExtValue(a.value_ + b);
}

ExtValue operator-(const ExtValue& a, const GroupElement& b) {
  if (a.infinite_) return a;
  return ExtValue(a.value_ - b);
}

std::strong_ordering operator<=>(const ExtValue& a, const ExtValue& b) {
  if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
  if (a.infinite_) return std::strong_ordering::greater;
  if (b.infinite_) return std::strong_ordering::less;
  return a.value_ <=> b.value_;
}

bool operator==(const ExtValue& a, const ExtValue& b) {
  return (a <=> b) == std::strong_ordering::equal;
}

std::string ExtValue::to_string() const { return infinite_ ? "inf" : value_.to_string(); }

}  // namespace hahn
