// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qlim/berry_esseen.hpp"
#include "qlim/distribution.hpp"
#include "qlim/io.hpp"
#include "qlim/rng.hpp"
#include "qlim/simulator.hpp"
#include "qlim/transforms.hpp"

namespace {

using namespace qlim;

constexpr std::uint64_t kMasterSeed = 1;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> body;
};

// FNV-1a over artifact bytes, chained across files in a fixed order.
struct Digest {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void add(const std::string& bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- shared runs ---------------------------------------------------------

struct ReplicatedRun {
  ReplicatedReport report;
  std::uint64_t digest;
};

ReplicatedRun replicated(const SimConfig& cfg, const AnalysisOptions& opt) {
  std::vector<std::uint64_t> per_rep(cfg.replications);
  ReplicatedReport report =
      run_replicated(cfg, opt, [&](std::uint64_t i, const Trajectory& t) {
        Digest d;
        d.add(io::trajectory_csv(t));
        per_rep[i] = d.h;
      });
  Digest all;
  for (std::uint64_t h : per_rep) all.add(std::to_string(h));
  all.add(io::report_to_json(report).dump(2));
  return {std::move(report), all.h};
}

SimConfig convergence_config() {
  SimConfig cfg{uniform_grid(10)};
  cfg.p = 0.37;
  cfg.n_max = 100000;
  cfg.master_seed = kMasterSeed;
  cfg.record_stride = 10;
  cfg.dense_until = 10000;
  cfg.replications = 100;
  return cfg;
}

SimConfig divergence_config() {
  SimConfig cfg{fair_coin()};
  cfg.p = 0.5;
  cfg.n_max = 100000;
  cfg.master_seed = kMasterSeed;
  cfg.record_stride = 1;
  cfg.replications = 100;
  return cfg;
}

SimConfig sandwich_config() {
  SimConfig cfg{figure_instance()};
  cfg.p = 0.5;
  cfg.n_max = 100000;
  cfg.master_seed = kMasterSeed;
  cfg.record_stride = 1;
  cfg.replications = 100;
  return cfg;
}

AnalysisOptions divergence_options() {
  AnalysisOptions opt;
  opt.kind = Analysis::kSwitchStats;
  opt.burn_in = 100;
  opt.min_switches = 10;
  return opt;
}

AnalysisOptions sandwich_options() {
  AnalysisOptions opt;
  opt.kind = Analysis::kSandwich;
  opt.burn_in = 1000;
  opt.epsilon = 0.1;
  opt.min_visits = 3;
  return opt;
}

AnalysisOptions convergence_options() {
  AnalysisOptions opt;
  opt.kind = Analysis::kConvergence;
  return opt;
}

// Artifacts of criteria 3-9, for the determinism rerun.
struct Artifacts {
  std::uint64_t convergence = 0;
  std::uint64_t divergence = 0;
  std::uint64_t sandwich = 0;
  std::string deviation;
  std::string phi;
  std::string block_event;

  bool operator==(const Artifacts&) const = default;
};

Artifacts g_first;
std::optional<ReplicatedReport> g_sandwich_report;

std::string deviation_json() {
  return io::to_json(deviation_experiment(0.5, 1, 0.25, 10000, kMasterSeed)).dump(2);
}
std::string phi_json() {
  return io::to_json(phi_of_k(bernoulli_moments(0.5), 1, 0.25)).dump(2);
}
std::string block_json() {
  return io::to_json(block_event_experiment(0.5, 0.25, 10000, kMasterSeed)).dump(2);
}

// ---- criteria ------------------------------------------------------------

Outcome quantile_oracle() {
  std::mt19937_64 gen(kMasterSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> mode(0, 3);
  int mismatches = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto d = make_discrete(oracle::random_atoms(gen, 20));
    const auto support = oracle::support_of(d);
    auto F = [&](double x) { return d.cdf(x); };
    double p = unit(gen);
    switch (mode(gen)) {
      case 0: {  // a flat level
        std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
        p = d.cumulative()[pick(gen)];
        break;
      }
      case 1:
        p = t % 2 == 0 ? 0.0 : 1.0;
        break;
      default:
        break;
    }
    if (left_quantile(d, p) != oracle::brute_left(support, F, p)) ++mismatches;
    if (right_quantile(d, p) != oracle::brute_right(support, F, p)) ++mismatches;
  }
  return {mismatches == 0, fmt("10000 cases, %d mismatches", mismatches)};
}

Outcome coin_equivalence() {
  SimConfig cfg{fair_coin()};
  cfg.p = 0.5;
  cfg.n_max = 1000;
  cfg.master_seed = kMasterSeed;
  std::uint64_t violations = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const Trajectory t = run_trajectory(cfg, rep);
    Xoshiro256 rng(t.seed);
    InverseCdfSampler sampler(cfg.distribution);
    long long z = 0;
    for (const TrajectoryRecord& r : t.records) {
      z += static_cast<long long>(sampler.draw(rng));
      violations += ((r.lq == -1) != (z <= 0)) + ((r.rq == -1) != (z < 0)) +
                    ((r.lq == 1) != (z > 0)) + ((r.rq == 1) != (z >= 0));
    }
    if (t.records.size() != 1000) ++violations;
  }
  return {violations == 0,
          fmt("100 seeds x 1000 steps, %llu violations",
              static_cast<unsigned long long>(violations))};
}

Outcome convergence() {
  const SimConfig cfg = convergence_config();
  const double target = left_quantile(cfg.distribution, cfg.p);
  ReplicatedRun run = replicated(cfg, convergence_options());
  g_first.convergence = run.digest;
  std::uint64_t exact = 0;
  for (const ReplicationResult& r : run.report.replications) {
    exact += (r.final_record.lq == target && r.final_record.rq == target) ? 1 : 0;
  }
  return {exact >= 99 && run.report.target.coincide,
          fmt("lq_F(0.37) = %g, final lq = rq = lq_F in %llu/100 seeds (need >= 99)",
              target, static_cast<unsigned long long>(exact))};
}

Outcome divergence() {
  ReplicatedRun run = replicated(divergence_config(), divergence_options());
  g_first.divergence = run.digest;
  std::vector<std::uint64_t> switches;
  for (const auto& r : run.report.replications) switches.push_back(r.stats->switch_count);
  std::sort(switches.begin(), switches.end());
  return {run.report.pass_count >= 95,
          fmt("switch_count >= 10 in %llu/100 seeds (need >= 95); median %llu, min %llu",
              static_cast<unsigned long long>(run.report.pass_count),
              static_cast<unsigned long long>(switches[50]),
              static_cast<unsigned long long>(switches[0]))};
}

Outcome sandwich() {
  ReplicatedRun run = replicated(sandwich_config(), sandwich_options());
  g_first.sandwich = run.digest;
  g_sandwich_report = run.report;
  std::uint64_t ok = 0;
  for (const auto& r : run.report.replications) ok += r.sandwich.value_or(false) ? 1 : 0;
  return {ok == 100 && run.report.gap_violation_total == 0,
          fmt("sandwich holds in %llu/100 seeds (need 100); %llu values inside (0, 3) "
              "over all n",
              static_cast<unsigned long long>(ok),
              static_cast<unsigned long long>(run.report.gap_violation_total))};
}

Outcome liminf_limsup() {
  if (!g_sandwich_report) return {false, "criterion 5 runs did not complete"};
  const ReplicatedReport& report = *g_sandwich_report;
  std::uint64_t ok = 0;
  for (const auto& r : report.replications) {
    const SwitchStats& s = *r.stats;
    ok += (s.running_min == 0 && s.running_max == 3 && s.visits_of(0) >= 3 &&
           s.visits_of(3) >= 3)
              ? 1
              : 0;
  }
  return {ok >= 90,
          fmt("min 0 / max 3 each visited >= 3 times after burn-in in %llu/100 "
              "seeds (need >= 90)",
              static_cast<unsigned long long>(ok))};
}

Outcome deviation_lemma() {
  const DeviationResult r = deviation_experiment(0.5, 1, 0.25, 10000, kMasterSeed);
  g_first.deviation = io::to_json(r).dump(2);
  return {r.phi.phi == 576 && r.freq_low > 0.30 && r.freq_high > 0.30,
          fmt("phi(1) = %llu, freq_low %.4f, freq_high %.4f (need > 0.30)",
              static_cast<unsigned long long>(r.phi.phi), r.freq_low, r.freq_high)};
}

Outcome phi_construction() {
  const BEParams coin = bernoulli_moments(0.5);
  const PhiOfK r = phi_of_k(coin, 1, 0.25);
  g_first.phi = io::to_json(r).dump(2);

  // Oracle: linear scans with the quadrature normal cdf.
  auto cond1 = [&](std::uint64_t n) {
    return 3.0 * coin.rho / (std::pow(coin.sigma, 3) * std::sqrt(double(n))) <= 0.125;
  };
  auto cond2 = [&](std::uint64_t n) {
    return oracle::normal_cdf_quadrature(1.0 / (coin.sigma * std::sqrt(double(n)))) < 0.625;
  };
  std::uint64_t n1 = 1, n2 = 1;
  while (!cond1(n1)) ++n1;
  while (!cond2(n2)) ++n2;
  const bool minimal = !cond1(r.n1 - 1) && !cond2(r.n2 - 1);
  const bool ok = r.n1 == 576 && r.n2 == 40 && r.phi == 576 && n1 == r.n1 &&
                  n2 == r.n2 && minimal;
  return {ok, fmt("(n1, n2, phi) = (%llu, %llu, %llu), oracle (%llu, %llu), minimal %s",
                  static_cast<unsigned long long>(r.n1),
                  static_cast<unsigned long long>(r.n2),
                  static_cast<unsigned long long>(r.phi),
                  static_cast<unsigned long long>(n1),
                  static_cast<unsigned long long>(n2), minimal ? "yes" : "no")};
}

Outcome block_event() {
  const BlockEventResult r = block_event_experiment(0.5, 0.25, 10000, kMasterSeed);
  g_first.block_event = io::to_json(r).dump(2);
  const double pd = static_cast<double>(oracle::binomial_cdf(576, 286, 0.5L));
  const std::uint64_t len = r.n2 - r.m1;
  const auto threshold = static_cast<std::uint64_t>(std::floor(len * 0.5 + 577)) + 1;
  const double pe =
      static_cast<double>(oracle::binomial_upper_tail(len, threshold, 0.5L));
  const double product = pd * pe;
  const double se = std::sqrt(product * (1 - product) / 10000);
  const bool ok = r.freq_c > 1.0 / 16 && r.freq_c >= 2.0 / 16 &&
                  std::abs(r.freq_c - product) <= 3 * se;
  return {ok, fmt("freq(C_1) %.4f (need > 1/16 with 2x margin); exact product %.4f "
                  "+/- 3se %.4f; schedule n1 %llu m1 %llu n2 %llu",
                  r.freq_c, product, 3 * se, static_cast<unsigned long long>(r.n1),
                  static_cast<unsigned long long>(r.m1),
                  static_cast<unsigned long long>(r.n2))};
}

Outcome be_validity() {
  const BEParams coin = bernoulli_moments(0.5);
  std::string detail;
  bool ok = true;
  for (std::uint64_t n : {25u, 100u, 400u}) {
    const double scale = coin.sigma * std::sqrt(double(n));
    double worst = 0.0;
    // Grid: every jump point and its left limit, plus a uniform z-grid.
    std::vector<double> grid;
    for (std::uint64_t k = 0; k <= n; ++k) grid.push_back((double(k) - n * coin.mu) / scale);
    for (int i = -600; i <= 600; ++i) grid.push_back(i / 100.0);
    // cdf[k] = P(S <= k), summed once per n.
    std::vector<double> cdf;
    long double run = 0.0L;
    for (std::uint64_t k = 0; k <= n; ++k) {
      run += oracle::binomial_pmf(n, k, 0.5L);
      cdf.push_back(static_cast<double>(run));
    }
    auto G_at = [&](long long s) {
      if (s < 0) return 0.0;
      return cdf[std::min<std::uint64_t>(static_cast<std::uint64_t>(s), n)];
    };
    for (double z : grid) {
      const double x = n * coin.mu + z * scale;  // S <= x
      const double G = G_at(static_cast<long long>(std::floor(x + 1e-9)));
      const double G_left = G_at(static_cast<long long>(std::ceil(x - 1e-9)) - 1);
      const double phi = oracle::normal_cdf_quadrature(z, 1e-14L);
      worst = std::max({worst, std::abs(G - phi), std::abs(G_left - phi)});
    }
    const double bound = be_bound(coin, n);
    ok = ok && worst <= bound;
    detail += fmt("n=%llu sup %.4f <= %.4f; ", static_cast<unsigned long long>(n), worst,
                  bound);
  }
  return {ok, detail};
}

Outcome transform_contract() {
  std::mt19937_64 gen(kMasterSeed + 11);
  int failures = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto [d, p] = oracle::random_gapped(gen, 20);
    const double lq = left_quantile(d, p);
    const auto c = collapse_shift(d, p);
    if (left_quantile(c, p) != lq || right_quantile(c, p) != lq) ++failures;
    const auto b = binarize(d, p);
    if (b.size() != 2 || b.value(0) != 0 || b.value(1) != 1 || b.prob(0) != p) ++failures;
  }
  return {failures == 0, fmt("1000 gapped distributions, %d failures", failures)};
}

Outcome determinism() {
  Artifacts second;
  second.convergence = replicated(convergence_config(), convergence_options()).digest;
  second.divergence = replicated(divergence_config(), divergence_options()).digest;
  second.sandwich = replicated(sandwich_config(), sandwich_options()).digest;
  second.deviation = deviation_json();
  second.phi = phi_json();
  second.block_event = block_json();
  const bool ok = second == g_first && g_first.convergence != 0;
  return {ok, ok ? "criteria 3-9 artifacts byte-identical on rerun"
                 : "artifacts differ between runs"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exact quantile oracle equivalence", 5, quantile_oracle},
      {2, "coin sign equivalence", 5, coin_equivalence},
      {3, "convergence with coincident quantiles", 60, convergence},
      {4, "divergence on the fair coin", 60, divergence},
      {5, "sandwich around the quantile gap", 60, sandwich},
      {6, "liminf / limsup equal left / right quantile", 1, liminf_limsup},
      {7, "deviation lemma frequencies", 30, deviation_lemma},
      {8, "phi(k) construction", 1, phi_construction},
      {9, "block event C_1", 60, block_event},
      {10, "Berry-Esseen bound validity", 5, be_validity},
      {11, "transform contract", 5, transform_contract},
      {12, "determinism of criteria 3-9", 600, determinism},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = out.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("[%s] #%d %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), out.detail.c_str(), secs, c.time_limit_s,
                in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
