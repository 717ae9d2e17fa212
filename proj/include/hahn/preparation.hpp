#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hahn/multiseries.hpp"
#include "hahn/puiseux.hpp"
#include "hahn/rv.hpp"

namespace hahn {

struct PreparedPoint {
  HahnSeries series;
  ExtValue depth;  // infinite when the point is an exact root
  std::string poly;
  unsigned derivative_order = 0;
};

struct PreparingSet {
  std::vector<PreparedPoint> points;

  std::vector<HahnSeries> centers() const;
  nlohmann::ordered_json to_json() const;
};

/// Centres from the roots of p and all its derivatives, expanded to `depth`.
PreparingSet preparing_points(const SeriesPoly& p, const GroupElement& depth);

struct PrepareOptions {
  std::uint64_t verify_trials = 200;
  std::uint64_t seed = 0;
  int max_deepen = 3;
  SamplerOptions sampler;
};

/// preparing_points at a depth beyond the sampler's reach, verified by
/// random sampling and deepened on failure (DepthExhausted at the end).
PreparingSet prepare_polynomial(const SeriesPoly& p, const GroupElement& lambda,
                                const PrepareOptions& opt = {});

/// f(x) to at least the requested precision (it may return more).
using Evaluable = std::function<TruncatedSeries(const TruncatedSeries& x, const GroupElement& target)>;

Evaluable polynomial_evaluable(const SeriesPoly& p);

/// rv_lambda(f(x)) with the evaluation precision raised until it is decided.
RvElement rv_of_value(const Evaluable& f, const TruncatedSeries& x, const GroupElement& lambda);

/// Checks that rv_lambda(f(x)) is constant on sampled balls lambda-next to C.
VerificationReport verify_preparation(const Evaluable& f, const std::vector<HahnSeries>& C,
                                      const GroupElement& lambda, std::uint64_t trials,
                                      std::uint64_t seed, const SamplerOptions& opt = {});

/// On balls 0-next to C, checks that v(f(x) - f(y)) - v(x - y) is the same
/// for all sampled pairs. The per-ball shifts go to details["shifts"].
VerificationReport jacobian_probe(const Evaluable& f, const std::vector<HahnSeries>& C,
                                  std::uint64_t trials, std::uint64_t seed,
                                  const SamplerOptions& opt = {});

/// {x : v(outer) < v(x - center) < v(inner)}.
struct Annulus {
  HahnSeries center, inner, outer;
  bool contains(const HahnSeries& x) const;
};

/// U(x) = 1 + g(inner / (x - center)) + h((x - center) / outer) for
/// univariate g and h without constant terms.
struct StrongUnit {
  MultiSeries g, h;
};

TruncatedSeries evaluate_strong_unit(const StrongUnit& u, const Annulus& a, const TruncatedSeries& x,
                                     const GroupElement& target);

/// Samples x, y in the annulus with rv_lambda(x - c) = rv_lambda(y - c) and
/// compares rv_lambda(U(x)) with rv_lambda(U(y)). With check_norms, g and h
/// must have coefficients of positive valuation (InvalidArgument otherwise).
VerificationReport strong_unit_probe(const StrongUnit& u, const Annulus& a, const GroupElement& lambda,
                                     std::uint64_t trials, std::uint64_t seed, bool check_norms = true,
                                     const SamplerOptions& opt = {});

}  // namespace hahn
