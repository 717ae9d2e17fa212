#include "hahn/preparation.hpp"

#include <algorithm>
#include <optional>

#include "hahn/error.hpp"

namespace hahn {

namespace {

GroupElement scalar_like(const GroupElement& g, const Rational& q) { return GroupElement::scalar(q, g.rank()); }

VerificationReport new_report(const std::string& op, const GroupElement& lambda, std::uint64_t trials,
                              std::uint64_t seed) {
  VerificationReport rep;
  rep.op = op;
  rep.lambda = lambda;
  rep.trials = trials;
  rep.seed = seed;
  return rep;
}

}  // namespace


namespace {

struct Decided {
  std::size_t index;
  RvElement rv;
};

// Points whose value stays undecided (a zero of f met by a truncated
// evaluation, a domain error) are dropped; a ball needs two decided points.
std::optional<std::vector<Decided>> decided_rvs(const Evaluable& f, const std::vector<HahnSeries>& pts,
                                                const GroupElement& lambda) {
  std::vector<Decided> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      out.push_back({i, rv_of_value(f, TruncatedSeries(pts[i]), lambda)});
    } catch (const Error& e) {
      if (!retryable(e.kind())) throw;
    }
  }
  if (out.size() < 2) return std::nullopt;
  return out;
}

// Records a violation if the decided points disagree; returns whether they did.
bool compare_rvs(const std::vector<Decided>& rvs, const std::vector<HahnSeries>& pts,
                 const BallDescriptor& ball, VerificationReport& rep) {
  for (std::size_t i = 1; i < rvs.size(); ++i) {
    if (rvs[i].rv == rvs[0].rv) continue;
    if (rep.violations.size() < kMaxStoredViolations)
      rep.violations.push_back({ball.to_json(), to_string(pts[rvs[0].index]), to_string(pts[rvs[i].index])});
    return true;
  }
  return false;
}

}  // namespace

std::vector<HahnSeries> PreparingSet::centers() const {
  std::vector<HahnSeries> out;
  for (const auto& p : points) out.push_back(p.series);
  return out;
}

nlohmann::ordered_json PreparingSet::to_json() const {
  nlohmann::ordered_json j;
  auto& arr = j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    nlohmann::ordered_json e;
    e["series"] = to_string(p.series);
    e["depth"] = p.depth.is_infinite() ? "inf" : p.depth.value().to_string();
    e["provenance"] = {{"poly", p.poly}, {"derivative_order", p.derivative_order}};
    arr.push_back(e);
  }
  return j;
}

PreparingSet preparing_points(const SeriesPoly& p, const GroupElement& depth) {
  PreparingSet set;
  SeriesPoly q = p;
  while (!q.empty() && q.back().is_exact_zero()) q.pop_back();
  for (unsigned k = 0; q.size() >= 2; ++k, q = poly_derivative(q)) {
    const std::string text = poly_to_string(q);
    for (const auto& r : puiseux_roots(q, depth)) {
      HahnSeries c = r.center();
      bool seen = std::any_of(set.points.begin(), set.points.end(),
                              [&](const PreparedPoint& o) { return o.series == c; });
      if (!seen) set.points.push_back({c, r.depth, text, k});
    }
  }
  if (set.points.empty())
    set.points.push_back({HahnSeries(depth.rank()), ExtValue::infinity(depth.rank()), poly_to_string(p), 0});
  return set;
}

namespace {

// sum a_k x^k below `target` for exact x, with each power of x kept only as
// deep as the later terms need it.
TruncatedSeries eval_below(const SeriesPoly& p, const HahnSeries& x, const GroupElement& target) {
  if (x.is_zero()) return p.empty() ? TruncatedSeries(x.rank()) : p[0];
  const GroupElement vx = x.valuation();
  std::vector<std::optional<GroupElement>> need(p.size());
  for (std::size_t k = p.size(); k-- > 0;) {
    ExtValue lb = p[k].valuation_lower_bound();
    if (lb.is_finite()) need[k] = target - lb.value();
    if (k + 1 < p.size() && need[k + 1]) {
      GroupElement carry = *need[k + 1] - vx;
      if (!need[k] || *need[k] < carry) need[k] = carry;
    }
  }
  TruncatedSeries sum(x.rank());
  HahnSeries pw = HahnSeries::constant(1, x.rank());
  for (std::size_t k = 0; k < p.size() && need[k]; ++k) {
    if (k > 0) pw = HahnSeries::mul_below(pw, x, ExtValue(*need[k]));
    sum = sum + TruncatedSeries(pw.truncated_below(ExtValue(*need[k])), ExtValue(*need[k])) * p[k];
  }
  return sum.with_prec(ExtValue(target));
}

// Rank 1 with exact data: series on the grid t^(1/N) with one integer
// denominator each, so products are plain integer convolutions.
struct Dense {
  long lo = 0;
  std::vector<Integer> c;  // value = sum c[i] t^((lo + i) / N) / den
  Integer den = 1;
};

Dense to_dense(const HahnSeries& s, long N) {
  Dense d;
  if (s.is_zero()) return d;
  for (const auto& t : s.terms()) mpz_lcm(d.den.get_mpz_t(), d.den.get_mpz_t(), t.coeff.get_den_mpz_t());
  Rational lo = s.valuation()[0] * N;
  d.lo = lo.get_num().get_si();
  for (const auto& t : s.terms()) {
    Rational i = t.exp[0] * N;
    std::size_t k = static_cast<std::size_t>(i.get_num().get_si() - d.lo);
    if (d.c.size() <= k) d.c.resize(k + 1);
    d.c[k] = t.coeff.get_num() * (d.den / t.coeff.get_den());
  }
  return d;
}

// Product keeping grid indices below hi.
Dense mul_dense(const Dense& a, const Dense& b, long hi) {
  Dense d;
  d.lo = a.lo + b.lo;
  d.den = a.den * b.den;
  if (a.c.empty() || b.c.empty() || hi <= d.lo) return d;
  std::size_t len = std::min<std::size_t>(a.c.size() + b.c.size() - 1, static_cast<std::size_t>(hi - d.lo));
  d.c.assign(len, 0);
  for (std::size_t i = 0; i < a.c.size() && i < len; ++i) {
    if (a.c[i] == 0) continue;
    for (std::size_t j = 0; j < b.c.size() && i + j < len; ++j)
      if (b.c[j] != 0) mpz_addmul(d.c[i + j].get_mpz_t(), a.c[i].get_mpz_t(), b.c[j].get_mpz_t());
  }
  return d;
}

void add_dense(Dense& acc, const Dense& b) {
  if (b.c.empty()) return;
  if (acc.c.empty()) {
    acc = b;
    return;
  }
  long lo = std::min(acc.lo, b.lo);
  long end = std::max(acc.lo + static_cast<long>(acc.c.size()), b.lo + static_cast<long>(b.c.size()));
  std::vector<Integer> c(static_cast<std::size_t>(end - lo), 0);
  for (std::size_t i = 0; i < acc.c.size(); ++i) c[acc.lo - lo + i] = acc.c[i] * b.den;
  for (std::size_t i = 0; i < b.c.size(); ++i) c[b.lo - lo + i] += b.c[i] * acc.den;
  acc.lo = lo;
  acc.c = std::move(c);
  acc.den *= b.den;
}

long grid_ceil(const GroupElement& g, long N) { return ceil(g[0] * N).get_si(); }

void note_denominators(const HahnSeries& s, Integer& N) {
  for (const auto& t : s.terms()) mpz_lcm(N.get_mpz_t(), N.get_mpz_t(), t.exp[0].get_den_mpz_t());
}

std::optional<TruncatedSeries> eval_dense(const SeriesPoly& p, const HahnSeries& x, const GroupElement& target) {
  if (x.rank() != 1 || x.is_zero()) return std::nullopt;
  Integer Nz = target[0].get_den();
  note_denominators(x, Nz);
  for (const auto& a : p) {
    if (!a.is_exact()) return std::nullopt;
    note_denominators(a.approx(), Nz);
  }
  if (!Nz.fits_slong_p() || Nz > 4096) return std::nullopt;
  const long N = Nz.get_si();
  const GroupElement vx = x.valuation();
  std::vector<std::optional<GroupElement>> need(p.size());
  for (std::size_t k = p.size(); k-- > 0;) {
    if (!p[k].approx().is_zero()) need[k] = target - p[k].approx().valuation();
    if (k + 1 < p.size() && need[k + 1]) {
      GroupElement carry = *need[k + 1] - vx;
      if (!need[k] || *need[k] < carry) need[k] = carry;
    }
  }
  const long top = grid_ceil(target, N);
  Dense xd = to_dense(x, N), pw, sum;
  pw.c = {1};
  for (std::size_t k = 0; k < p.size() && need[k]; ++k) {
    if (k > 0) pw = mul_dense(pw, xd, grid_ceil(*need[k], N));
    if (!p[k].approx().is_zero()) add_dense(sum, mul_dense(to_dense(p[k].approx(), N), pw, top));
  }
  std::vector<SeriesTerm> terms;
  for (std::size_t i = 0; i < sum.c.size(); ++i)
    if (sum.c[i] != 0) terms.push_back({GroupElement::scalar(ratio(sum.lo + static_cast<long>(i), N)), Rational(sum.c[i], sum.den)});
  return TruncatedSeries(HahnSeries::from_terms(std::move(terms), 1), ExtValue(target));
}

}  // namespace

Evaluable polynomial_evaluable(const SeriesPoly& p) {
  return [p](const TruncatedSeries& x, const GroupElement& target) {
    if (!x.is_exact()) return poly_eval(p, x);
    // A vanishing truncation may hide an exact zero; look deeper, then exactly.
    GroupElement bound = target;
    for (int k = 0; k < 2; ++k) {
      auto dense = eval_dense(p, x.approx(), bound);
      auto v = dense ? *dense : eval_below(p, x.approx(), bound);
      if (!v.approx().is_zero()) return v;
      bound += scalar_like(target, 16);
    }
    return poly_eval(p, x);
  };
}

PreparingSet prepare_polynomial(const SeriesPoly& p, const GroupElement& lambda, const PrepareOptions& opt) {
  if (lambda.sign() < 0) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
  GroupElement depth =
      scalar_like(lambda, opt.sampler.window_hi + lambda[0] + opt.sampler.extra_depth + 1);
  auto f = polynomial_evaluable(p);
  for (int attempt = 0; attempt <= opt.max_deepen; ++attempt) {
    PreparingSet set = preparing_points(p, depth);
    auto rep = verify_preparation(f, set.centers(), lambda, opt.verify_trials, opt.seed, opt.sampler);
    if (rep.passed()) return set;
    depth += scalar_like(lambda, 4);
  }
  throw Error(ErrorKind::DepthExhausted,
              "sampling still finds violations with roots expanded to depth " + depth.to_string());
}

RvElement rv_of_value(const Evaluable& f, const TruncatedSeries& x, const GroupElement& lambda) {
  GroupElement target = lambda + scalar_like(lambda, 2);
  for (int k = 0; k < 6; ++k) {
    try {
      return rv_lambda(f(x, target), lambda);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientPrecision) throw;
    }
    target += scalar_like(lambda, Rational(4 << k));
  }
  throw Error(ErrorKind::UndecidableAtPrecision, "rv of f(" + to_string(x) + ") stays undetermined");
}

VerificationReport verify_preparation(const Evaluable& f, const std::vector<HahnSeries>& C,
                                      const GroupElement& lambda, std::uint64_t trials,
                                      std::uint64_t seed, const SamplerOptions& opt) {
  if (C.empty()) throw Error(ErrorKind::InvalidArgument, "the set C must be nonempty");
  auto rep = new_report("verify_preparation", lambda, trials, seed);
  std::uint64_t violating = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, t);
    bool done = false;
    for (int attempt = 0; attempt < opt.max_resample && !done; ++attempt) {
      auto base = sample_base(C, lambda, opt, rng);
      if (!base) continue;
      std::vector<HahnSeries> pts{base->point};
      for (int i = 1; i < opt.points_per_ball; ++i)
        pts.push_back(perturb_beyond(base->point, base->ball.radius(), opt.extra_depth, rng));
      auto rvs = decided_rvs(f, pts, lambda);
      if (!rvs) continue;
      done = true;
      if (compare_rvs(*rvs, pts, base->ball, rep)) ++violating;
    }
    if (!done) ++rep.skipped;
  }
  if (violating > rep.violations.size()) rep.details["violating_trials"] = violating;
  return rep;
}

namespace {

// Shift for every pair; all points are evaluated at one common precision.
std::vector<ExtValue> jacobian_shifts(const Evaluable& f, const std::vector<HahnSeries>& pts,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<GroupElement> vxy;
  for (auto [i, j] : pairs) vxy.push_back((pts[i] - pts[j]).valuation());
  GroupElement target = *std::max_element(vxy.begin(), vxy.end());
  target += scalar_like(target, 2);
  for (int k = 0; k < 6; ++k) {
    std::vector<TruncatedSeries> vals;
    for (const auto& p : pts) vals.push_back(f(TruncatedSeries(p), target));
    std::vector<ExtValue> out;
    for (std::size_t n = 0; n < pairs.size(); ++n) {
      TruncatedSeries d = vals[pairs[n].first] - vals[pairs[n].second];
      if (d.is_exact_zero()) out.push_back(ExtValue::infinity(target.rank()));
      else if (!d.approx().is_zero()) out.push_back(ExtValue(d.approx().valuation() - vxy[n]));
      else break;
    }
    if (out.size() == pairs.size()) return out;
    target += scalar_like(target, Rational(4 << k));
  }
  throw Error(ErrorKind::UndecidableAtPrecision, "f(x) - f(y) stays undetermined");
}

}  // namespace

VerificationReport jacobian_probe(const Evaluable& f, const std::vector<HahnSeries>& C, std::uint64_t trials,
                                  std::uint64_t seed, const SamplerOptions& opt) {
  if (C.empty()) throw Error(ErrorKind::InvalidArgument, "the set C must be nonempty");
  const GroupElement lambda(C.front().rank());
  auto rep = new_report("jacobian_probe", lambda, trials, seed);
  auto shifts = nlohmann::ordered_json::array();
  std::uint64_t violating = 0;
  const int npts = std::max(3, opt.points_per_ball);
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, t);
    bool done = false;
    for (int attempt = 0; attempt < opt.max_resample && !done; ++attempt) {
      auto base = sample_base(C, lambda, opt, rng);
      if (!base) continue;
      std::vector<HahnSeries> pts{base->point};
      for (int i = 1; i < npts; ++i)
        pts.push_back(perturb_beyond(base->point, base->ball.radius(), opt.extra_depth, rng));
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
          if (pts[i] != pts[j]) pairs.emplace_back(i, j);
      if (pairs.empty()) continue;
      std::vector<ExtValue> s;
      try {
        s = jacobian_shifts(f, pts, pairs);
      } catch (const Error& e) {
        if (!retryable(e.kind())) throw;
        continue;
      }
      done = true;
      if (shifts.size() < kMaxStoredViolations)
        shifts.push_back({{"ball", base->ball.to_json()}, {"shift", s[0].is_infinite() ? "inf" : s[0].value().to_string()}});
      for (std::size_t k = 1; k < s.size(); ++k) {
        if (s[k] == s[0]) continue;
        ++violating;
        if (rep.violations.size() < kMaxStoredViolations)
          rep.violations.push_back(
              {base->ball.to_json(), to_string(pts[pairs[k].first]), to_string(pts[pairs[k].second])});
        break;
      }
    }
    if (!done) ++rep.skipped;
  }
  if (violating > rep.violations.size()) rep.details["violating_trials"] = violating;
  rep.details["shifts"] = shifts;
  return rep;
}

// ---------------------------------------------------------------------------

bool Annulus::contains(const HahnSeries& x) const {
  HahnSeries d = x - center;
  if (d.is_zero()) return false;
  return outer.valuation() < d.valuation() && d.valuation() < inner.valuation();
}

TruncatedSeries evaluate_strong_unit(const StrongUnit& u, const Annulus& a, const TruncatedSeries& x,
                                     const GroupElement& target) {
  if (!a.contains(x.approx()) || !x.leading_determined())
    throw Error(ErrorKind::DomainViolation, to_string(x) + " is not in the annulus");
  TruncatedSeries d = x - TruncatedSeries(a.center);
  const GroupElement vd = d.approx().valuation();
  TruncatedSeries w1 = TruncatedSeries(a.inner) * invert(d, target - a.inner.valuation());
  TruncatedSeries w2 = d * invert(TruncatedSeries(a.outer), target - vd);
  // Exact inputs to polynomial g, h give an exact value.
  const bool exact = w1.is_exact() && w2.is_exact() && !u.g.truncated_tail() && !u.h.truncated_tail();
  const ExtValue cap = exact ? ExtValue::infinity(target.rank()) : ExtValue(target);
  TruncatedSeries U = TruncatedSeries::constant(1, target.rank());
  if (!u.g.is_zero()) U = U + evaluate(u.g, {w1}, cap);
  if (!u.h.is_zero()) U = U + evaluate(u.h, {w2}, cap);
  return U.with_prec(cap);
}

VerificationReport strong_unit_probe(const StrongUnit& u, const Annulus& a, const GroupElement& lambda,
                                     std::uint64_t trials, std::uint64_t seed, bool check_norms,
                                     const SamplerOptions& opt) {
  if (a.inner.is_zero() || a.outer.is_zero() || !(a.outer.valuation() < a.inner.valuation()))
    throw Error(ErrorKind::InvalidArgument, "annulus needs v(outer) < v(inner)");
  if (u.g.nvars() != 1 || u.h.nvars() != 1)
    throw Error(ErrorKind::InvalidArgument, "g and h must be univariate");
  if (check_norms) {
    for (const auto* f : {&u.g, &u.h})
      if (!f->is_zero() && gauss_data(*f).norm.sign() <= 0)
        throw Error(ErrorKind::InvalidArgument, "g and h need coefficients of positive valuation");
  }
  auto rep = new_report("strong_unit_probe", lambda, trials, seed);
  const std::size_t rank = lambda.rank();
  const Rational vo = a.outer.valuation()[0], vi = a.inner.valuation()[0];
  Evaluable U = [&](const TruncatedSeries& x, const GroupElement& target) {
    return evaluate_strong_unit(u, a, x, target);
  };
  std::uint64_t violating = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, t);
    bool done = false;
    for (int attempt = 0; attempt < opt.max_resample && !done; ++attempt) {
      int den = std::uniform_int_distribution<int>(1, 4)(rng);
      long lo = floor(vo * den).get_si() + 1, hi = ceil(vi * den).get_si() - 1;
      Rational g = (vo + vi) / 2;
      if (lo <= hi) g = Rational(std::uniform_int_distribution<long>(lo, hi)(rng), den);
      g.canonicalize();
      const GroupElement gamma = GroupElement::scalar(g, rank);
      std::vector<SeriesTerm> jet{{GroupElement(rank), random_coeff(rng)}};
      if (lambda.sign() > 0)
        for (int i = 0, n = std::uniform_int_distribution<int>(0, 2)(rng); i < n; ++i)
          jet.push_back({lambda.scaled(Rational(std::uniform_int_distribution<int>(1, 4)(rng), 4)),
                         random_coeff(rng)});
      HahnSeries x0 = a.center + HahnSeries::from_terms(std::move(jet), rank).shifted(gamma);
      BallDescriptor ball = ball_of(TruncatedSeries(x0), TruncatedSeries(a.center), lambda);
      std::vector<HahnSeries> pts{x0};
      for (int i = 1; i < opt.points_per_ball; ++i)
        pts.push_back(perturb_beyond(x0, ball.radius(), opt.extra_depth, rng));
      for (const auto& p : pts)
        if (!a.contains(p)) throw Error(ErrorKind::DomainViolation, "sample " + to_string(p) + " left the annulus");
      auto rvs = decided_rvs(U, pts, lambda);
      if (!rvs) continue;
      done = true;
      if (compare_rvs(*rvs, pts, ball, rep)) ++violating;
    }
    if (!done) ++rep.skipped;
  }
  if (violating > rep.violations.size()) rep.details["violating_trials"] = violating;
  return rep;
}

}  // namespace hahn
