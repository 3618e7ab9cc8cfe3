#ifndef QLIM_EMPIRICAL_HPP_
#define QLIM_EMPIRICAL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qlim/distribution.hpp"

namespace qlim {

// Streaming empirical distribution F_n over a known finite support.
//
// Observations are stored as per-atom counts, so inserting is
// O(log |support|) and every quantile query is a cumulative scan over the
// support, independent of n.  Owned by one writer at a time; const queries
// on a quiescent sample are safe from many threads.
class EmpiricalSample {
 public:
  explicit EmpiricalSample(const DiscreteDistribution& d);

  // Throws kValueOutsideSupport unless x is exactly one of the atoms.
  void insert(double x);
  // Hot path used by the simulator: atom index instead of value.
  void insert_index(std::size_t atom) {
    ++counts_[atom];
    ++n_;
  }
  void reset();

  std::uint64_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  std::span<const double> support() const { return support_; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  // F_n(x) = #{observations <= x} / n.  Throws kEmptySample when n = 0.
  double ecdf(double x) const;

  // inf{x : F_n(x) >= p} and inf{x : F_n(x) > p}; equal to the order
  // statistics x_(ceil(np)) and x_(floor(np)+1).  Require n >= 1 and
  // 0 < p < 1.
  double left_quantile(double p) const;
  double right_quantile(double p) const;
  // Both in a single scan: {left, right}.
  std::pair<double, double> quantiles(double p) const;
  // Atom indices of the two sample quantiles.
  std::pair<std::size_t, std::size_t> quantile_indices(double p) const;

  // The empirical distribution as a DiscreteDistribution (atoms with a
  // nonzero count, weights count/n).
  DiscreteDistribution to_distribution() const;

 private:
  void check_query(double p) const;

  std::vector<double> support_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_ = 0;
};

struct GCDistance {
  double value;
  double witness;
};

// sup_x |F_n(x) - F(x)|, exact.  Both functions are right-continuous steps
// whose jumps sit on the shared support, so the supremum is attained at an
// atom; the leftmost maximizing atom is reported as the witness.
// Throws kEmptySample for n = 0 and kValueOutsideSupport if the sample is
// not bound to d's support.
GCDistance gc_distance(const EmpiricalSample& s, const DiscreteDistribution& d);

}  // namespace qlim

#endif  // QLIM_EMPIRICAL_HPP_
