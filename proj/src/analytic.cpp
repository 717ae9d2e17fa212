#include "hahn/analytic.hpp"

#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>

#include "hahn/error.hpp"

namespace hahn {

namespace {

Rational inv_factorial(unsigned k) {
  Integer f = 1;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return Rational(1) / Rational(f);
}

TaylorRule univariate(std::function<Rational(unsigned)> g) {
  return [g = std::move(g)](const MultiIndex& m) { return g(m.at(0)); };
}

bool valid_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return s != "inv" && s != "t" && s != "x";
}

void gen_indices(std::size_t pos, unsigned left, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = left;
    out.push_back(cur);
    return;
  }
  for (unsigned e = left + 1; e-- > 0;) {
    cur[pos] = e;
    gen_indices(pos + 1, left - e, cur, out);
  }
}

}  // namespace

std::optional<BuiltinRule> builtin_rule(const std::string& id) {
  if (id == "exp") return BuiltinRule{univariate([](unsigned k) { return inv_factorial(k); }), std::nullopt};
  if (id == "sin")
    return BuiltinRule{univariate([](unsigned k) {
                         if (k % 2 == 0) return Rational(0);
                         return (k / 2) % 2 ? -inv_factorial(k) : inv_factorial(k);
                       }),
                       std::nullopt};
  if (id == "cos")
    return BuiltinRule{univariate([](unsigned k) {
                         if (k % 2 == 1) return Rational(0);
                         return (k / 2) % 2 ? -inv_factorial(k) : inv_factorial(k);
                       }),
                       std::nullopt};
  if (id == "log1p")
    return BuiltinRule{univariate([](unsigned k) {
                         if (k == 0) return Rational(0);
                         Rational r(1, k);
                         return k % 2 ? r : Rational(-r);
                       }),
                       Rational(1)};
  if (id == "geometric") return BuiltinRule{univariate([](unsigned) { return Rational(1); }), Rational(1)};
  return std::nullopt;
}

std::vector<MultiIndex> graded_indices(std::size_t nvars, unsigned degree) {
  std::vector<MultiIndex> out;
  if (nvars == 0) return out;
  MultiIndex cur(nvars, 0);
  gen_indices(0, degree, cur, out);
  return out;
}

TaylorRule table_rule(std::size_t nvars, std::vector<Rational> coeffs) {
  auto table = std::make_shared<std::map<MultiIndex, Rational>>();
  std::size_t k = 0;
  for (unsigned d = 0; k < coeffs.size(); ++d)
    for (auto& m : graded_indices(nvars, d))
      if (k < coeffs.size()) (*table)[m] = coeffs[k++];
  return [table](const MultiIndex& m) {
    auto it = table->find(m);
    return it == table->end() ? Rational(0) : it->second;
  };
}

// ---------------------------------------------------------------------------

FunctionRegistry::FunctionRegistry() {
  // log1p converges only on the open unit disc; it is pre-registered with
  // its true radius instead of going through the radius > 1 contract.
  for (const char* id : {"exp", "sin", "cos", "log1p"}) {
    auto b = builtin_rule(id);
    AnalyticFunction f;
    f.name = id;
    f.nvars = 1;
    f.taylor = b->taylor;
    f.radius = b->convergence_radius ? *b->convergence_radius : Rational(2);
    f.norm_bound = true;
    f.rule = id;
    insert(std::move(f));
  }
}

const AnalyticFunction& FunctionRegistry::insert(AnalyticFunction f) {
  std::lock_guard<std::mutex> lock(mu_);
  if (by_name_.count(f.name)) throw Error(ErrorKind::DuplicateName, "function '" + f.name + "' already registered");
  funcs_.push_back(std::move(f));
  by_name_[funcs_.back().name] = &funcs_.back();
  return funcs_.back();
}

const AnalyticFunction& FunctionRegistry::register_function(AnalyticFunction f) {
  if (!valid_name(f.name)) throw Error(ErrorKind::MalformedRule, "invalid function name '" + f.name + "'");
  if (f.nvars == 0) throw Error(ErrorKind::MalformedRule, "a function needs at least one variable");
  if (!f.taylor) throw Error(ErrorKind::MalformedRule, "missing Taylor rule");
  if (!(f.radius > 1))
    throw Error(ErrorKind::MalformedRule, "radius must be > 1, got " + to_string(f.radius));
  return insert(std::move(f));
}

const AnalyticFunction& FunctionRegistry::register_line(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tok;
  for (std::string w; in >> w;) tok.push_back(w);
  auto bad = [&](const std::string& why) -> Error {
    return Error(ErrorKind::MalformedRule, why + " in '" + line + "'");
  };
  std::size_t i = 0;
  auto keyword = [&](const char* kw) {
    if (i + 1 >= tok.size() || tok[i] != kw) throw bad(std::string("expected '") + kw + " <value>'");
    i += 2;
    return tok[i - 1];
  };
  AnalyticFunction f;
  f.name = keyword("name");
  try {
    std::string v = keyword("vars");
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) throw bad("bad variable count");
    f.nvars = std::stoul(v);
    f.radius = parse_rational(keyword("radius"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedRule) throw;
    throw bad(e.what());
  }
  if (i >= tok.size() || tok[i] != "rule") throw bad("expected 'rule'");
  ++i;
  if (i >= tok.size()) throw bad("missing rule");
  if (tok[i].rfind("table:", 0) == 0) {
    std::vector<Rational> coeffs;
    std::string first = tok[i].substr(6);
    ++i;
    try {
      if (!first.empty()) coeffs.push_back(parse_rational(first));
      for (; i < tok.size() && tok[i] != "norm1"; ++i) coeffs.push_back(parse_rational(tok[i]));
    } catch (const Error& e) {
      throw bad(std::string("bad table coefficient: ") + e.what());
    }
    if (coeffs.empty()) throw bad("empty table");
    unsigned deg = 0;
    for (std::size_t k = 0, d = 0; k < coeffs.size(); ++d) {
      k += graded_indices(f.nvars, static_cast<unsigned>(d)).size();
      deg = static_cast<unsigned>(d);
    }
    f.rule = "table:";
    for (const auto& c : coeffs) f.rule += " " + to_string(c);
    f.taylor = table_rule(f.nvars, std::move(coeffs));
    f.polynomial_degree = deg;
  } else {
    auto b = builtin_rule(tok[i]);
    if (!b) throw bad("unknown rule '" + tok[i] + "'");
    if (f.nvars != 1) throw bad("builtin rules are univariate");
    if (b->convergence_radius && f.radius > *b->convergence_radius)
      throw Error(ErrorKind::MalformedRule, "rule '" + tok[i] + "' converges only on radius " +
                                                to_string(*b->convergence_radius) + " < declared " +
                                                to_string(f.radius));
    f.rule = tok[i];
    f.taylor = b->taylor;
    ++i;
  }
  if (i < tok.size() && tok[i] == "norm1") {
    f.norm_bound = true;
    ++i;
  }
  if (i != tok.size()) throw bad("unexpected trailing '" + tok[i] + "'");
  return register_function(std::move(f));
}

void FunctionRegistry::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  for (std::string line; std::getline(in, line);) {
    auto p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == '#') continue;
    register_line(line);
  }
}

const AnalyticFunction* FunctionRegistry::find(const std::string& name) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

std::vector<std::string> FunctionRegistry::names() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> out;
  for (const auto& [n, f] : by_name_) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------

TruncatedSeries evaluate_analytic(const AnalyticFunction& f, const std::vector<TruncatedSeries>& a,
                                  const GroupElement& target_prec) {
  if (a.size() != f.nvars)
    throw Error(ErrorKind::ArityMismatch, f.name + " takes " + std::to_string(f.nvars) +
                                              " arguments, got " + std::to_string(a.size()));
  const std::size_t rank = target_prec.rank();
  for (const auto& x : a)
    if (x.rank() != rank) throw Error(ErrorKind::RankMismatch, "argument rank differs from target");

  unsigned N;
  ExtValue cap(target_prec);
  if (f.polynomial_degree) {
    N = *f.polynomial_degree;
    cap = ExtValue::infinity(rank);
  } else {
    std::optional<Rational> vmin;
    for (const auto& x : a) {
      if (x.is_exact_zero()) continue;
      ExtValue lb = x.valuation_lower_bound();
      if (lb.is_infinite() || lb.value().sign() <= 0)
        throw Error(ErrorKind::NotInfinitesimal,
                    f.name + " is evaluated only at infinitesimal arguments, got " + to_string(x));
      Rational first = lb.value()[0];
      if (sgn(first) <= 0)
        throw Error(ErrorKind::NotInfinitesimal,
                    "argument valuation " + lb.value().to_string() +
                        " has zero first coordinate; the degree bound is undefined");
      if (!vmin || first < *vmin) vmin = first;
    }
    if (!vmin) return TruncatedSeries::constant(f.taylor(MultiIndex(f.nvars, 0)), rank);
    Rational T = target_prec[0];
    N = sgn(T) <= 0 ? 0 : static_cast<unsigned>(ceil(T / *vmin).get_ui());
  }

  std::vector<std::vector<TruncatedSeries>> powers(f.nvars);
  for (std::size_t i = 0; i < f.nvars; ++i) powers[i].push_back(TruncatedSeries::constant(1, rank));
  auto capped = [&](const TruncatedSeries& x) { return x.with_prec(cap); };
  TruncatedSeries sum(HahnSeries(rank), cap);
  for (unsigned d = 0; d <= N; ++d) {
    for (const auto& m : graded_indices(f.nvars, d)) {
      Rational c = f.taylor(m);
      if (sgn(c) == 0) continue;
      TruncatedSeries term = capped(TruncatedSeries::constant(c, rank));
      for (std::size_t i = 0; i < f.nvars; ++i) {
        while (powers[i].size() <= m[i]) powers[i].push_back(capped(powers[i].back() * capped(a[i])));
        if (m[i] > 0) term = capped(term * powers[i][m[i]]);
      }
      sum = sum + term;
    }
  }
  return sum;
}

MultiSeries taylor_expansion(const AnalyticFunction& f, unsigned D, std::size_t rank) {
  bool poly = f.polynomial_degree && *f.polynomial_degree <= D;
  MultiSeries out(f.nvars, D, !poly, rank);
  for (unsigned d = 0; d <= D; ++d)
    for (const auto& m : graded_indices(f.nvars, d)) {
      Rational c = f.taylor(m);
      if (sgn(c) != 0) out.add_term(m, TruncatedSeries::constant(c, rank));
    }
  return out;
}

}  // namespace hahn
