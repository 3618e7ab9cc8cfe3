#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qlim/distribution.hpp"
#include "qlim/errors.hpp"

namespace qlim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Errc error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected qlim::Error");
  return Errc::kInvalidConfig;
}

TEST_CASE("make_discrete sorts, merges and renormalizes") {
  const Atom coin[] = {{1, 0.5}, {-1, 0.5}};
  auto d = make_discrete(coin);
  REQUIRE(d.size() == 2);
  CHECK(d.atoms()[0] == Atom{-1, 0.5});
  CHECK(d.atoms()[1] == Atom{1, 0.5});

  const Atom dup[] = {{2, 0.5}, {2, 0.5}};
  auto single = make_discrete(dup);
  REQUIRE(single.size() == 1);
  CHECK(single.atoms()[0] == Atom{2, 1.0});

  const Atom fig[] = {{0, 0.5}, {3, 0.3}, {5, 0.2}};
  CHECK(make_discrete(fig) == figure_instance());
  CHECK(figure_instance().size() == 3);

  // Inside tolerance: divided by the exact sum.
  const Atom off[] = {{0, 0.5 + 4e-13}, {1, 0.5}};
  auto d2 = make_discrete(off);
  CHECK(d2.cumulative().back() == 1.0);
  CHECK(d2.prob(0) + d2.prob(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_discrete error paths") {
  CHECK(error_code([] { make_discrete(std::span<const Atom>{}); }) ==
        Errc::kEmptyDistribution);
  const Atom neg[] = {{0, -0.5}, {1, 1.5}};
  CHECK(error_code([&] { make_discrete(neg); }) == Errc::kNegativeProbability);
  const Atom zero[] = {{0, 0.0}, {1, 1.0}};
  CHECK(error_code([&] { make_discrete(zero); }) == Errc::kNegativeProbability);
  const Atom sum[] = {{0, 0.5}, {1, 0.6}};
  CHECK(error_code([&] { make_discrete(sum); }) ==
        Errc::kProbabilitySumOutOfTolerance);
  const Atom tiny_off[] = {{0, 0.5 + 2e-12}, {1, 0.5}};
  CHECK(error_code([&] { make_discrete(tiny_off); }) ==
        Errc::kProbabilitySumOutOfTolerance);
}

TEST_CASE("cdf is the right-continuous step function") {
  const auto coin = fair_coin();
  CHECK(coin.cdf(-1) == 0.5);
  CHECK(coin.cdf(0) == 0.5);
  CHECK(coin.cdf(-1.5) == 0.0);
  CHECK(coin.cdf(1) == 1.0);
  CHECK(coin.cdf_below(-1) == 0.0);
  CHECK(coin.cdf_below(1) == 0.5);
  CHECK(figure_instance().cdf(3) == 0.8);
}

TEST_CASE("cdf matches in-order summation of atom probabilities") {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 500; ++t) {
    auto d = make_discrete(oracle::random_atoms(gen, 20));
    double running = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      running += d.prob(i);
      if (i + 1 < d.size()) {
        CHECK(d.cdf(d.value(i)) == running);
      } else {
        CHECK(d.cdf(d.value(i)) == 1.0);
        CHECK(std::abs(running - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("left and right quantiles: examples") {
  const auto coin = fair_coin();
  const auto fig = figure_instance();
  CHECK(left_quantile(coin, 0.5) == -1);
  CHECK(right_quantile(coin, 0.5) == 1);
  CHECK(left_quantile(fig, 0.5) == 0);
  CHECK(right_quantile(fig, 0.5) == 3);
  CHECK(left_quantile(fig, 0.0) == -kInf);
  CHECK(right_quantile(fig, 1.0) == kInf);
  CHECK(left_quantile(fig, 1.0) == 5);
  CHECK(right_quantile(fig, 0.0) == 0);

  CHECK(error_code([&] { left_quantile(coin, 1.5); }) == Errc::kProbabilityOutOfRange);
  CHECK(error_code([&] { right_quantile(coin, -0.1); }) == Errc::kProbabilityOutOfRange);
  CHECK(error_code([&] { left_quantile(coin, std::nan("")); }) ==
        Errc::kProbabilityOutOfRange);
}

TEST_CASE("quantile_pair examples") {
  auto q = quantile_pair(point_mass(7), 0.3);
  CHECK(q.left == 7);
  CHECK(q.right == 7);
  CHECK(q.coincide);

  q = quantile_pair(fair_coin(), 0.5);
  CHECK(q.left == -1);
  CHECK(q.right == 1);
  CHECK_FALSE(q.coincide);

  const auto coin = fair_coin();
  const auto support = oracle::support_of(coin);
  auto F = [&](double x) { return coin.cdf(x); };
  q = quantile_pair(coin, 0.25);
  CHECK(q.left == oracle::brute_left(support, F, 0.25));
  CHECK(q.right == oracle::brute_right(support, F, 0.25));
  CHECK(q.left == -1);
  CHECK(q.coincide);
}

TEST_CASE("solution_interval examples") {
  // Direct scan of F(x-) <= p <= F(x) over a fine grid for the coin.
  const auto coin = fair_coin();
  double lo = kInf, hi = -kInf;
  for (int i = -300; i <= 300; ++i) {
    const double x = i / 100.0;
    if (coin.cdf_below(x) <= 0.5 && 0.5 <= coin.cdf(x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  auto s = solution_interval(coin, 0.5);
  CHECK(s.lo == lo);
  CHECK(s.hi == hi);
  CHECK(s.lo == -1);
  CHECK(s.hi == 1);
  CHECK_FALSE(s.unique);

  s = solution_interval(point_mass(7), 0.5);
  CHECK(s.lo == 7);
  CHECK(s.hi == 7);
  CHECK(s.unique);

  s = solution_interval(figure_instance(), 0.9);
  CHECK(s.lo == 5);
  CHECK(s.hi == 5);
  CHECK(s.unique);

  CHECK(error_code([] { solution_interval(fair_coin(), 0.0); }) ==
        Errc::kProbabilityOutOfRange);
  CHECK(error_code([] { solution_interval(fair_coin(), 1.0); }) ==
        Errc::kProbabilityOutOfRange);
}

TEST_CASE("property: quantiles against brute force and structural invariants") {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    auto d = make_discrete(oracle::random_atoms(gen, 20));
    const auto support = oracle::support_of(d);
    auto F = [&](double x) { return d.cdf(x); };

    std::vector<double> levels = {0.0, 1.0, unit(gen), unit(gen)};
    for (double c : d.cumulative()) levels.push_back(c);
    std::sort(levels.begin(), levels.end());

    double prev_left = -kInf, prev_right = -kInf;
    for (double p : levels) {
      const auto q = quantile_pair(d, p);
      REQUIRE(q.left == oracle::brute_left(support, F, p));
      REQUIRE(q.right == oracle::brute_right(support, F, p));
      CHECK(q.left <= q.right);
      CHECK(q.coincide == (q.left == q.right));
      CHECK(q.left >= prev_left);
      CHECK(q.right >= prev_right);
      prev_left = q.left;
      prev_right = q.right;

      // Values are atoms, apart from the infinite endpoints.
      if (p > 0.0) CHECK(d.find(q.left) < d.size());
      if (p < 1.0) CHECK(d.find(q.right) < d.size());

      // No mass strictly between the two quantiles.
      double inside = 0.0;
      for (const Atom& a : d.atoms()) {
        if (a.value > q.left && a.value < q.right) inside += a.prob;
      }
      CHECK(inside == 0.0);

      if (p > 0.0 && p < 1.0) {
        const auto s = solution_interval(d, p);
        CHECK(s.unique == q.coincide);
        CHECK(solves_quantile_condition(d, s.lo, p));
        CHECK(solves_quantile_condition(d, s.hi, p));
      }
    }
  }
}

}  // namespace
}  // namespace qlim
