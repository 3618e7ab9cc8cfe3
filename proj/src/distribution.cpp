#include "qlim/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qlim/errors.hpp"

namespace qlim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_closed_unit(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(Errc::kProbabilityOutOfRange,
                "p must lie in [0, 1], got " + std::to_string(p));
  }
}

void check_open_unit(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(Errc::kProbabilityOutOfRange,
                "p must lie in (0, 1), got " + std::to_string(p));
  }
}

}  // namespace

DiscreteDistribution DiscreteDistribution::make(std::span<const Atom> pairs) {
  if (pairs.empty()) {
    throw Error(Errc::kEmptyDistribution, "at least one atom is required");
  }
  double sum = 0.0;
  for (const Atom& a : pairs) {
    if (!(a.prob > 0.0) || !std::isfinite(a.prob)) {
      throw Error(Errc::kNegativeProbability,
                  "atom probabilities must be positive, got " +
                      std::to_string(a.prob));
    }
    if (!std::isfinite(a.value)) {
      throw Error(Errc::kParameterOutOfRange, "atom values must be finite");
    }
    sum += a.prob;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(Errc::kProbabilitySumOutOfTolerance,
                "probabilities sum to " + std::to_string(sum));
  }

  std::vector<Atom> sorted(pairs.begin(), pairs.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Atom& a, const Atom& b) { return a.value < b.value; });

  DiscreteDistribution d;
  for (const Atom& a : sorted) {
    if (!d.atoms_.empty() && d.atoms_.back().value == a.value) {
      d.atoms_.back().prob += a.prob;
    } else {
      d.atoms_.push_back(a);
    }
  }

  double total = 0.0;
  for (const Atom& a : d.atoms_) total += a.prob;
  if (total != 1.0) {
    for (Atom& a : d.atoms_) a.prob /= total;
  }

  d.cumulative_.reserve(d.atoms_.size());
  double running = 0.0;
  for (const Atom& a : d.atoms_) {
    running += a.prob;
    d.cumulative_.push_back(running);
  }
  // Rounding in the running sum must not leave F short of 1 at the last atom.
  d.cumulative_.back() = 1.0;
  return d;
}

DiscreteDistribution DiscreteDistribution::from_counts(
    std::span<const double> values, std::span<const std::uint64_t> counts) {
  if (values.empty() || values.size() != counts.size()) {
    throw Error(Errc::kEmptyDistribution, "values and counts must be nonempty and aligned");
  }
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (counts[i] == 0) throw Error(Errc::kNegativeProbability, "zero count");
    if (!std::isfinite(values[i]) || (i > 0 && !(values[i - 1] < values[i]))) {
      throw Error(Errc::kParameterOutOfRange, "values must be finite and increasing");
    }
    total += counts[i];
  }
  DiscreteDistribution d;
  const double n = static_cast<double>(total);
  std::uint64_t cum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    cum += counts[i];
    d.atoms_.push_back({values[i], static_cast<double>(counts[i]) / n});
    d.cumulative_.push_back(static_cast<double>(cum) / n);
  }
  return d;
}

std::size_t DiscreteDistribution::lower_index(double x) const {
  auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), x,
      [](const Atom& a, double v) { return a.value < v; });
  return static_cast<std::size_t>(it - atoms_.begin());
}

std::size_t DiscreteDistribution::find(double x) const {
  std::size_t i = lower_index(x);
  if (i < atoms_.size() && atoms_[i].value == x) return i;
  return atoms_.size();
}

double DiscreteDistribution::cdf(double x) const {
  auto it = std::upper_bound(
      atoms_.begin(), atoms_.end(), x,
      [](double v, const Atom& a) { return v < a.value; });
  std::size_t count = static_cast<std::size_t>(it - atoms_.begin());
  return count == 0 ? 0.0 : cumulative_[count - 1];
}

double DiscreteDistribution::cdf_below(double x) const {
  std::size_t count = lower_index(x);
  return count == 0 ? 0.0 : cumulative_[count - 1];
}

DiscreteDistribution point_mass(double x) {
  const Atom atoms[] = {{x, 1.0}};
  return DiscreteDistribution::make(atoms);
}

DiscreteDistribution fair_coin() {
  const Atom atoms[] = {{-1.0, 0.5}, {1.0, 0.5}};
  return DiscreteDistribution::make(atoms);
}

DiscreteDistribution bernoulli(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(Errc::kParameterOutOfRange,
                "bernoulli q must lie in (0, 1), got " + std::to_string(q));
  }
  const Atom atoms[] = {{0.0, 1.0 - q}, {1.0, q}};
  return DiscreteDistribution::make(atoms);
}

DiscreteDistribution figure_instance() {
  const Atom atoms[] = {{0.0, 0.5}, {3.0, 0.3}, {5.0, 0.2}};
  return DiscreteDistribution::make(atoms);
}

DiscreteDistribution uniform_grid(std::size_t count) {
  if (count == 0) {
    throw Error(Errc::kEmptyDistribution, "uniform grid needs at least one atom");
  }
  std::vector<Atom> atoms;
  atoms.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    atoms.push_back({static_cast<double>(i + 1), 1.0 / static_cast<double>(count)});
  }
  return DiscreteDistribution::make(atoms);
}

double left_quantile(const DiscreteDistribution& d, double p) {
  check_closed_unit(p);
  if (p == 0.0) return -kInf;
  auto cum = d.cumulative();
  // First atom with F >= p; F reaches exactly 1 so this always exists.
  auto it = std::lower_bound(cum.begin(), cum.end(), p);
  return d.value(static_cast<std::size_t>(it - cum.begin()));
}

double right_quantile(const DiscreteDistribution& d, double p) {
  check_closed_unit(p);
  if (p == 1.0) return kInf;
  auto cum = d.cumulative();
  auto it = std::upper_bound(cum.begin(), cum.end(), p);
  return d.value(static_cast<std::size_t>(it - cum.begin()));
}

QuantilePair quantile_pair(const DiscreteDistribution& d, double p) {
  const double left = left_quantile(d, p);
  const double right = right_quantile(d, p);
  return {p, left, right, left == right};
}

SolutionInterval solution_interval(const DiscreteDistribution& d, double p) {
  check_open_unit(p);
  const QuantilePair q = quantile_pair(d, p);
  return {q.left, q.right, q.coincide};
}

bool solves_quantile_condition(const DiscreteDistribution& d, double x,
                               double p) {
  return d.cdf_below(x) <= p && p <= d.cdf(x);
}

}  // namespace qlim
