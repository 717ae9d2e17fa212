#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hahn/error.hpp"
#include "hahn/report.hpp"
#include "hahn/series.hpp"

namespace hahn {

/// An element of RV_lambda: zero, or a valuation together with the unit jet
/// t^(-gamma) x truncated to exponents in [0, lambda].
struct RvElement {
  GroupElement lambda;
  bool zero = true;
  GroupElement gamma;
  HahnSeries jet;

  static RvElement make_zero(const GroupElement& lambda);
  bool operator==(const RvElement& o) const;
  std::string to_string() const;
};

RvElement rv_lambda(const TruncatedSeries& x, const GroupElement& lambda);

enum class RvOp { mul, inv };
RvElement rv_combine(RvOp kind, const RvElement& a, const std::optional<RvElement>& b = std::nullopt);

/// Leading coefficient; 0 for exact zero.
Rational angular_component(const TruncatedSeries& x);

/// The fibre {x : rv_lambda(x - center) = datum}; a Zero datum is the point
/// {center}, otherwise an open ball of radius gamma + lambda.
struct BallDescriptor {
  TruncatedSeries center;
  RvElement datum;

  bool is_singleton() const { return datum.zero; }
  GroupElement radius() const { return datum.gamma + datum.lambda; }
  bool contains(const TruncatedSeries& x) const;
  bool operator==(const BallDescriptor& o) const;
  nlohmann::ordered_json to_json() const;
};

BallDescriptor ball_of(const TruncatedSeries& x, const TruncatedSeries& center,
                       const GroupElement& lambda);

/// Random point of a non-singleton ball. Extra terms live on the grid
/// radius + {1/2, 1, ..., extra_depth}.
TruncatedSeries sample_in_ball(const BallDescriptor& b, std::uint64_t rng_seed,
                               const Rational& extra_depth = 2);

constexpr std::size_t kMaxStoredViolations = 25;

/// Errors after which a randomized check draws a fresh sample.
bool retryable(ErrorKind k);
/// Uniform in {-9, ..., 9} minus zero.
Rational random_coeff(std::mt19937_64& rng);

struct SamplerOptions {
  Rational window_lo = -2;  // range for the valuation of x - c at the base point
  Rational window_hi = 4;
  Rational extra_depth = 2;
  int points_per_ball = 3;
  int max_resample = 16;
};

using Membership = std::function<bool(const TruncatedSeries&)>;

/// Per-trial generator derived from (seed, trial index).
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

/// A random point x0 near a random element of C; returns x0 and the ball
/// lambda-next to C containing it (as a ball around the nearest centre).
struct BaseSample {
  HahnSeries point;
  BallDescriptor ball;
};
std::optional<BaseSample> sample_base(const std::vector<HahnSeries>& C, const GroupElement& lambda,
                                      const SamplerOptions& opt, std::mt19937_64& rng);

/// x0 + delta with delta supported strictly beyond `radius`.
HahnSeries perturb_beyond(const HahnSeries& x0, const GroupElement& radius,
                          const Rational& extra_depth, std::mt19937_64& rng);

VerificationReport check_prepares(const std::vector<TruncatedSeries>& C, const Membership& member,
                                  const GroupElement& lambda, std::uint64_t trials,
                                  std::uint64_t rng_seed, const SamplerOptions& opt = {});

}  // namespace hahn
