#include "qlim/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qlim/errors.hpp"

namespace qlim {

EmpiricalSample::EmpiricalSample(const DiscreteDistribution& d)
    : counts_(d.size(), 0) {
  support_.reserve(d.size());
  for (const Atom& a : d.atoms()) support_.push_back(a.value);
}

void EmpiricalSample::insert(double x) {
  auto it = std::lower_bound(support_.begin(), support_.end(), x);
  if (it == support_.end() || *it != x) {
    throw Error(Errc::kValueOutsideSupport,
                std::to_string(x) + " is not an atom of the bound support");
  }
  insert_index(static_cast<std::size_t>(it - support_.begin()));
}

void EmpiricalSample::reset() {
  std::fill(counts_.begin(), counts_.end(), 0);
  n_ = 0;
}

double EmpiricalSample::ecdf(double x) const {
  if (n_ == 0) throw Error(Errc::kEmptySample, "F_n undefined for n = 0");
  std::uint64_t below = 0;
  for (std::size_t i = 0; i < support_.size() && support_[i] <= x; ++i) {
    below += counts_[i];
  }
  return static_cast<double>(below) / static_cast<double>(n_);
}

void EmpiricalSample::check_query(double p) const {
  if (n_ == 0) throw Error(Errc::kEmptySample, "sample quantile of empty sample");
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(Errc::kProbabilityOutOfRange,
                "sample quantiles need p in (0, 1), got " + std::to_string(p));
  }
}

std::pair<std::size_t, std::size_t> EmpiricalSample::quantile_indices(
    double p) const {
  check_query(p);
  const double n = static_cast<double>(n_);
  std::uint64_t cum = 0;
  std::size_t i = 0;
  const std::size_t last = support_.size() - 1;
  // F_n(x_i) = cum / n, compared as a rounded quotient against p.
  for (; i < last; ++i) {
    cum += counts_[i];
    if (static_cast<double>(cum) / n >= p) break;
  }
  const std::size_t left = i;
  if (i == last || static_cast<double>(cum) / n > p) return {left, left};
  for (++i; i < last; ++i) {
    cum += counts_[i];
    if (static_cast<double>(cum) / n > p) break;
  }
  return {left, i};
}

std::pair<double, double> EmpiricalSample::quantiles(double p) const {
  auto [l, r] = quantile_indices(p);
  return {support_[l], support_[r]};
}

double EmpiricalSample::left_quantile(double p) const {
  return support_[quantile_indices(p).first];
}

double EmpiricalSample::right_quantile(double p) const {
  return support_[quantile_indices(p).second];
}

DiscreteDistribution EmpiricalSample::to_distribution() const {
  if (n_ == 0) throw Error(Errc::kEmptySample, "empty sample has no distribution");
  std::vector<double> values;
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (counts_[i] > 0) {
      values.push_back(support_[i]);
      counts.push_back(counts_[i]);
    }
  }
  return DiscreteDistribution::from_counts(values, counts);
}

GCDistance gc_distance(const EmpiricalSample& s, const DiscreteDistribution& d) {
  if (s.empty()) throw Error(Errc::kEmptySample, "gc distance needs n >= 1");
  auto support = s.support();
  if (support.size() != d.size() ||
      !std::equal(support.begin(), support.end(), d.atoms().begin(),
                  [](double v, const Atom& a) { return v == a.value; })) {
    throw Error(Errc::kValueOutsideSupport,
                "sample is not bound to the distribution's support");
  }
  auto counts = s.counts();
  auto cum = d.cumulative();
  const double n = static_cast<double>(s.size());
  GCDistance best{0.0, d.value(0)};
  std::uint64_t running = 0;
  // Left limits F(a_i-) equal the values at a_{i-1} (or 0 before a_0), so
  // scanning the atoms covers every breakpoint and its left limit.
  for (std::size_t i = 0; i < d.size(); ++i) {
    running += counts[i];
    const double gap = std::abs(static_cast<double>(running) / n - cum[i]);
    if (gap > best.value) best = {gap, d.value(i)};
  }
  return best;
}

}  // namespace qlim
