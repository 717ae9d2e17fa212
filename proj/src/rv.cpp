#include "hahn/rv.hpp"

#include <algorithm>

#include "hahn/error.hpp"

namespace hahn {

namespace {

GroupElement unit_step(std::size_t rank, std::size_t coord, const Rational& q) {
  std::vector<Rational> c(rank, Rational(0));
  c[coord] = q;
  return GroupElement(std::move(c));
}


// v(a - b) without forming the difference; nullopt when a == b.
std::optional<GroupElement> difference_valuation(const HahnSeries& a, const HahnSeries& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::size_t i = 0;
  for (; i < x.size() && i < y.size(); ++i) {
    if (x[i].exp != y[i].exp) return std::min(x[i].exp, y[i].exp);
    if (x[i].coeff != y[i].coeff) return x[i].exp;
  }
  if (i < x.size()) return x[i].exp;
  if (i < y.size()) return y[i].exp;
  return std::nullopt;
}

}  // namespace

Rational random_coeff(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 9), s(0, 1);
  return Rational(s(rng) ? d(rng) : -d(rng));
}

bool retryable(ErrorKind k) {
  switch (k) {
    case ErrorKind::DomainError:
    case ErrorKind::UndecidedSign:
    case ErrorKind::DivisionByZero:
    case ErrorKind::UndecidableAtPrecision:
    case ErrorKind::NotInfinitesimal:
      return true;
    default:
      return false;
  }
}

RvElement RvElement::make_zero(const GroupElement& lambda) {
  RvElement r;
  r.lambda = lambda;
  r.zero = true;
  r.gamma = GroupElement(lambda.rank());
  r.jet = HahnSeries(lambda.rank());
  return r;
}

bool RvElement::operator==(const RvElement& o) const {
  if (lambda != o.lambda || zero != o.zero) return false;
  return zero || (gamma == o.gamma && jet == o.jet);
}

std::string RvElement::to_string() const {
  if (zero) return "0";
  return "(" + gamma.to_string() + ", " + hahn::to_string(jet) + ")";
}

RvElement rv_lambda(const TruncatedSeries& x, const GroupElement& lambda) {
  if (lambda.rank() != x.rank())
    throw Error(ErrorKind::RankMismatch, "lambda and x have different ranks");
  if (lambda.sign() < 0) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
  if (x.is_exact_zero()) return RvElement::make_zero(lambda);
  if (x.approx().is_zero())
    throw Error(ErrorKind::InsufficientPrecision,
                "leading term undetermined below " + x.prec().to_string());
  const GroupElement& v = x.approx().valuation();
  if (!(x.prec() > ExtValue(v + lambda)))
    throw Error(ErrorKind::InsufficientPrecision,
                "jet to depth " + lambda.to_string() + " needs precision above " +
                    (v + lambda).to_string() + ", have " + x.prec().to_string());
  RvElement r;
  r.lambda = lambda;
  r.zero = false;
  r.gamma = v;
  r.jet = x.approx().shifted(-v).truncated_at_most(lambda);
  return r;
}

RvElement rv_combine(RvOp kind, const RvElement& a, const std::optional<RvElement>& b) {
  if (kind == RvOp::inv) {
    if (a.zero) throw Error(ErrorKind::ZeroInverse, "inverse of the zero class");
    const std::size_t rank = a.lambda.rank();
    auto inv = invert(TruncatedSeries(a.jet), a.lambda + unit_step(rank, rank - 1, 1));
    RvElement r = a;
    r.gamma = -a.gamma;
    r.jet = inv.approx().truncated_at_most(a.lambda);
    return r;
  }
  if (!b) throw Error(ErrorKind::InvalidArgument, "product needs two operands");
  if (a.lambda != b->lambda) throw Error(ErrorKind::InvalidArgument, "lambda mismatch");
  if (a.zero || b->zero) return RvElement::make_zero(a.lambda);
  RvElement r = a;
  r.gamma = a.gamma + b->gamma;
  r.jet = (a.jet * b->jet).truncated_at_most(a.lambda);
  return r;
}

Rational angular_component(const TruncatedSeries& x) {
  if (x.is_exact_zero()) return 0;
  if (x.approx().is_zero())
    throw Error(ErrorKind::InsufficientPrecision,
                "leading coefficient undetermined below " + x.prec().to_string());
  return x.approx().leading_coeff();
}

bool BallDescriptor::contains(const TruncatedSeries& x) const {
  return rv_lambda(x - center, datum.lambda) == datum;
}

bool BallDescriptor::operator==(const BallDescriptor& o) const {
  return center == o.center && datum == o.datum;
}

nlohmann::ordered_json BallDescriptor::to_json() const {
  nlohmann::ordered_json j;
  j["center"] = to_string(center);
  j["lambda"] = datum.lambda.to_string();
  if (datum.zero) {
    j["datum"] = "0";
  } else {
    j["gamma"] = datum.gamma.to_string();
    j["jet"] = to_string(datum.jet);
  }
  return j;
}

BallDescriptor ball_of(const TruncatedSeries& x, const TruncatedSeries& center,
                       const GroupElement& lambda) {
  return BallDescriptor{center, rv_lambda(x - center, lambda)};
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

HahnSeries perturb_beyond(const HahnSeries& x0, const GroupElement& radius,
                          const Rational& extra_depth, std::mt19937_64& rng) {
  const std::size_t rank = radius.rank();
  long steps = std::max<long>(1, floor(extra_depth * 2).get_si());
  std::vector<long> ks(steps);
  for (long i = 0; i < steps; ++i) ks[i] = i + 1;
  std::shuffle(ks.begin(), ks.end(), rng);
  std::uniform_int_distribution<long> count(1, std::min<long>(3, steps));
  std::uniform_int_distribution<std::size_t> coord(0, rank - 1);
  std::vector<SeriesTerm> terms;
  for (long i = 0, n = count(rng); i < n; ++i)
    terms.push_back({radius + unit_step(rank, coord(rng), ratio(ks[i], 2)), random_coeff(rng)});
  return x0 + HahnSeries::from_terms(std::move(terms), rank);
}

TruncatedSeries sample_in_ball(const BallDescriptor& b, std::uint64_t rng_seed,
                               const Rational& extra_depth) {
  if (b.is_singleton()) throw Error(ErrorKind::SingletonBall, "cannot sample a singleton ball");
  auto rng = trial_rng(rng_seed, 0);
  HahnSeries x0 = b.center.approx() + b.datum.jet.shifted(b.datum.gamma);
  return TruncatedSeries(perturb_beyond(x0, b.radius(), extra_depth, rng));
}

std::optional<BaseSample> sample_base(const std::vector<HahnSeries>& C, const GroupElement& lambda,
                                      const SamplerOptions& opt, std::mt19937_64& rng) {
  const std::size_t rank = lambda.rank();
  const HahnSeries& c = C[std::uniform_int_distribution<std::size_t>(0, C.size() - 1)(rng)];

  // Valuations where the ball structure around C changes are tried half the time.
  std::vector<Rational> structural{Rational(0)};
  for (const auto& o : C) {
    if (auto d = difference_valuation(o, c)) structural.push_back(d->leading());
    if (!o.is_zero()) structural.push_back(o.valuation().leading());
  }
  Rational g;
  if (std::uniform_int_distribution<int>(0, 1)(rng)) {
    g = structural[std::uniform_int_distribution<std::size_t>(0, structural.size() - 1)(rng)];
  } else {
    static const int dens[] = {1, 2, 3, 4};
    int den = dens[std::uniform_int_distribution<int>(0, 3)(rng)];
    long lo = ceil(opt.window_lo * den).get_si(), hi = floor(opt.window_hi * den).get_si();
    if (hi < lo) hi = lo;
    g = Rational(std::uniform_int_distribution<long>(lo, hi)(rng), den);
    g.canonicalize();
  }
  GroupElement gamma = GroupElement::scalar(g, rank);

  std::vector<SeriesTerm> jet{{GroupElement(rank), random_coeff(rng)}};
  if (lambda.sign() > 0) {
    for (int i = 0, n = std::uniform_int_distribution<int>(0, 2)(rng); i < n; ++i) {
      int j = std::uniform_int_distribution<int>(1, 4)(rng);
      jet.push_back({lambda.scaled(ratio(j, 4)), random_coeff(rng)});
    }
  }
  HahnSeries x0 = c + HahnSeries::from_terms(std::move(jet), rank).shifted(gamma);

  const HahnSeries* nearest = nullptr;
  GroupElement best;
  for (const auto& o : C) {
    auto d = difference_valuation(x0, o);
    if (!d) return std::nullopt;
    if (!nearest || *d > best) {
      nearest = &o;
      best = *d;
    }
  }
  return BaseSample{x0, ball_of(TruncatedSeries(x0), TruncatedSeries(*nearest), lambda)};
}

VerificationReport check_prepares(const std::vector<TruncatedSeries>& C, const Membership& member,
                                  const GroupElement& lambda, std::uint64_t trials,
                                  std::uint64_t rng_seed, const SamplerOptions& opt) {
  if (C.empty()) throw Error(ErrorKind::InvalidArgument, "the set C must be nonempty");
  std::vector<HahnSeries> points;
  for (const auto& c : C) points.push_back(c.approx());

  VerificationReport rep;
  rep.op = "check_prepares";
  rep.lambda = lambda;
  rep.trials = trials;
  rep.seed = rng_seed;
  std::uint64_t violating = 0;

  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(rng_seed, t);
    bool done = false;
    for (int attempt = 0; attempt < opt.max_resample && !done; ++attempt) {
      auto base = sample_base(points, lambda, opt, rng);
      if (!base) continue;
      std::vector<HahnSeries> pts{base->point};
      for (int i = 1; i < opt.points_per_ball; ++i)
        pts.push_back(perturb_beyond(base->point, base->ball.radius(), opt.extra_depth, rng));
      std::vector<bool> in;
      try {
        for (const auto& p : pts) in.push_back(member(TruncatedSeries(p)));
      } catch (const Error& e) {
        if (!retryable(e.kind())) throw;
        continue;
      }
      done = true;
      auto yes = std::find(in.begin(), in.end(), true), no = std::find(in.begin(), in.end(), false);
      if (yes != in.end() && no != in.end()) {
        ++violating;
        if (rep.violations.size() < kMaxStoredViolations)
          rep.violations.push_back({base->ball.to_json(), to_string(pts[yes - in.begin()]),
                                    to_string(pts[no - in.begin()])});
      }
    }
    if (!done) ++rep.skipped;
  }
  if (violating > rep.violations.size()) rep.details["violating_trials"] = violating;
  return rep;
}

}  // namespace hahn
