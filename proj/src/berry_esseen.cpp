#include "qlim/berry_esseen.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qlim/errors.hpp"

namespace qlim {
namespace {

constexpr std::uint64_t kSearchLimit = std::uint64_t{1} << 62;

// Smallest n >= 1 satisfying a predicate that is false up to some point and
// true from there on.  Doubling to bracket, then bisection.
template <typename Pred>
std::uint64_t smallest_satisfying(Pred pred) {
  if (pred(1)) return 1;
  std::uint64_t lo = 1;  // pred(lo) false
  std::uint64_t hi = 2;
  while (!pred(hi)) {
    if (hi >= kSearchLimit) {
      throw Error(Errc::kParameterOutOfRange,
                  "sample size search exceeded 2^62");
    }
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

BEParams make_be_params(double mu, double sigma, double rho) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma) ||
      !(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(Errc::kParameterOutOfRange,
                "need finite mu, sigma > 0 and rho > 0");
  }
  return {mu, sigma, rho};
}

double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

BEParams bernoulli_moments(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(Errc::kParameterOutOfRange,
                "q must lie in (0, 1), got " + std::to_string(q));
  }
  const double r = 1.0 - q;
  return {q, std::sqrt(q * r), q * q * q * r + r * r * r * q};
}

double be_bound(const BEParams& params, std::uint64_t n) {
  if (n == 0) throw Error(Errc::kParameterOutOfRange, "n must be >= 1");
  const double s3 = params.sigma * params.sigma * params.sigma;
  return 3.0 * params.rho / (s3 * std::sqrt(static_cast<double>(n)));
}

ProbBracket interval_prob_bounds(const BEParams& params, std::uint64_t n,
                                 double z1, double z2) {
  if (!(z1 < z2)) {
    throw Error(Errc::kInvalidInterval, "need z1 < z2");
  }
  const double mass = std_normal_cdf(z2) - std_normal_cdf(z1);
  const double slack = 2.0 * be_bound(params, n);
  return {std::max(0.0, mass - slack), std::min(1.0, mass + slack)};
}

PhiOfK phi_of_k(const BEParams& params, std::uint64_t k, double alpha) {
  if (k == 0) throw Error(Errc::kParameterOutOfRange, "k must be >= 1");
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(Errc::kParameterOutOfRange,
                "alpha must lie in (0, 1/2), got " + std::to_string(alpha));
  }
  const double half_alpha = alpha / 2.0;
  const std::uint64_t n1 = smallest_satisfying(
      [&](std::uint64_t n) { return be_bound(params, n) <= half_alpha; });

  const double level = 0.5 + half_alpha;
  const double kd = static_cast<double>(k);
  const std::uint64_t n2 = smallest_satisfying([&](std::uint64_t n) {
    return std_normal_cdf(kd / (params.sigma * std::sqrt(static_cast<double>(n)))) <
           level;
  });
  return {k, alpha, n1, n2, std::max(n1, n2)};
}

}  // namespace qlim
