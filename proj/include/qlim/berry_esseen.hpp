#ifndef QLIM_BERRY_ESSEEN_HPP_
#define QLIM_BERRY_ESSEEN_HPP_

#include <cstdint>

namespace qlim {

// Moments feeding the Berry-Esseen bound: mean, standard deviation and
// third absolute central moment E|X - mu|^3.
struct BEParams {
  double mu;
  double sigma;
  double rho;
};

// Validates sigma > 0 and rho > 0 (kParameterOutOfRange otherwise).
BEParams make_be_params(double mu, double sigma, double rho);

// Standard normal distribution function.
double std_normal_cdf(double z);

// mu = q, sigma = sqrt(q(1-q)), rho = q^3(1-q) + (1-q)^3 q.
BEParams bernoulli_moments(double q);

// 3 rho / (sigma^3 sqrt(n)), the classical constant.
double be_bound(const BEParams& params, std::uint64_t n);

struct ProbBracket {
  double lo;
  double hi;
};

// Bracket for P(z1 < sqrt(n)(mean - mu)/sigma <= z2): the normal mass
// Phi(z2) - Phi(z1) widened by 6 rho / (sigma^3 sqrt(n)) and clipped to
// [0, 1].  Infinite endpoints are allowed; z1 < z2 is required
// (kInvalidInterval).
ProbBracket interval_prob_bounds(const BEParams& params, std::uint64_t n,
                                 double z1, double z2);

// Sample size making a centred sum deviate by more than k in either
// direction with probability > 1/2 - alpha.
//
//   n1  = min{n : 3 rho / (sigma^3 sqrt(n)) <= alpha / 2}
//   n2  = min{n : Phi(k / (sigma sqrt(n))) < 1/2 + alpha / 2}
//   phi = max(n1, n2)
struct PhiOfK {
  std::uint64_t k;
  double alpha;
  std::uint64_t n1;
  std::uint64_t n2;
  std::uint64_t phi;
};

// Requires k >= 1 and 0 < alpha < 1/2 (kParameterOutOfRange).
PhiOfK phi_of_k(const BEParams& params, std::uint64_t k, double alpha);

}  // namespace qlim

#endif  // QLIM_BERRY_ESSEEN_HPP_
