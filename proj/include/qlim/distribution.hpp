#ifndef QLIM_DISTRIBUTION_HPP_
#define QLIM_DISTRIBUTION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qlim {

struct Atom {
  double value;
  double prob;

  friend bool operator==(const Atom&, const Atom&) = default;
};

// A probability distribution with finitely many atoms.
//
// Atoms are kept sorted by value with no duplicates and strictly positive
// probabilities summing to one.  The cumulative table is the distribution
// function F evaluated at each atom; its last entry is exactly 1.
// Instances are immutable after construction.
class DiscreteDistribution {
 public:
  // Sorts, merges duplicate values by summing their probability and
  // renormalizes by the exact sum.  Throws Error with kEmptyDistribution,
  // kNegativeProbability (any prob <= 0) or kProbabilitySumOutOfTolerance
  // (|sum - 1| > kSumTolerance).
  static DiscreteDistribution make(std::span<const Atom> pairs);

  // Empirical law of a sample: values sorted and distinct, counts > 0.
  // F at atom i is exactly (count up to i) / total, with no running-sum drift.
  static DiscreteDistribution from_counts(std::span<const double> values,
                                          std::span<const std::uint64_t> counts);

  static constexpr double kSumTolerance = 1e-12;

  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const double> cumulative() const { return cumulative_; }
  std::size_t size() const { return atoms_.size(); }
  double value(std::size_t i) const { return atoms_[i].value; }
  double prob(std::size_t i) const { return atoms_[i].prob; }

  // F(x): total probability of atoms <= x.
  double cdf(double x) const;
  // F(x-): total probability of atoms < x.
  double cdf_below(double x) const;

  // Index of the first atom whose value is >= x, or size() if none.
  std::size_t lower_index(double x) const;

  // Index of the atom holding the value x, or size() when x is not an atom.
  std::size_t find(double x) const;

  friend bool operator==(const DiscreteDistribution& a,
                         const DiscreteDistribution& b) {
    return a.atoms_ == b.atoms_;
  }

 private:
  DiscreteDistribution() = default;

  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

inline DiscreteDistribution make_discrete(std::span<const Atom> pairs) {
  return DiscreteDistribution::make(pairs);
}

DiscreteDistribution point_mass(double x);
// Atoms -1 and +1 with probability 1/2 each.
DiscreteDistribution fair_coin();
// Atoms 0 and 1 with P(1) = q, 0 < q < 1.
DiscreteDistribution bernoulli(double q);
// Atoms (0, 0.5), (3, 0.3), (5, 0.2): quantiles 0 and 3 at p = 1/2.
DiscreteDistribution figure_instance();
// Atoms 1..count with equal probability.
DiscreteDistribution uniform_grid(std::size_t count);

// Extended-real quantiles.  Both accept p in [0, 1] and throw
// kProbabilityOutOfRange otherwise (NaN included).
//
//   left_quantile(d, p)  = inf{x : F(x) >= p}   (-inf at p = 0)
//   right_quantile(d, p) = inf{x : F(x) >  p}   (+inf at p = 1)
double left_quantile(const DiscreteDistribution& d, double p);
double right_quantile(const DiscreteDistribution& d, double p);

struct QuantilePair {
  double p;
  double left;
  double right;
  bool coincide;
};

QuantilePair quantile_pair(const DiscreteDistribution& d, double p);

// Solution set of F(x-) <= p <= F(x), a closed interval.
struct SolutionInterval {
  double lo;
  double hi;
  bool unique;
};

// Requires 0 < p < 1.
SolutionInterval solution_interval(const DiscreteDistribution& d, double p);

// True when F(x-) <= p <= F(x).
bool solves_quantile_condition(const DiscreteDistribution& d, double x,
                               double p);

}  // namespace qlim

#endif  // QLIM_DISTRIBUTION_HPP_
