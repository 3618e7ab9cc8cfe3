#include "qlim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "qlim/empirical.hpp"
#include "qlim/errors.hpp"

namespace qlim {

std::size_t InverseCdfSampler::draw_index(Xoshiro256& rng) const {
  const double u = rng.uniform01();
  auto cum = d_->cumulative();
  return static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), u) -
                                  cum.begin());
}

std::vector<double> sample_stream(const DiscreteDistribution& d,
                                  std::uint64_t seed, std::uint64_t n) {
  if (n == 0) throw Error(Errc::kParameterOutOfRange, "n must be >= 1");
  Xoshiro256 rng(seed);
  InverseCdfSampler sampler(d);
  std::vector<double> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(sampler.draw(rng));
  return out;
}

BinomialSampler::BinomialSampler(std::uint64_t trials, double q)
    : trials_(trials) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(Errc::kParameterOutOfRange, "binomial q must lie in (0, 1)");
  }
  const double n = static_cast<double>(trials);
  const double sd = std::sqrt(n * q * (1.0 - q));
  const double span = std::ceil(40.0 * sd) + 1.0;
  const auto mode = static_cast<std::uint64_t>(std::floor((n + 1.0) * q));
  const std::uint64_t top = std::min<std::uint64_t>(trials, mode);
  first_ = top > span ? top - static_cast<std::uint64_t>(span) : 0;
  const std::uint64_t last =
      std::min<std::uint64_t>(trials, top + static_cast<std::uint64_t>(span));

  // Weights relative to the mode, walked outwards with the pmf ratio.
  std::vector<double> w(last - first_ + 1, 0.0);
  const std::uint64_t at = top - first_;
  w[at] = 1.0;
  const double odds = q / (1.0 - q);
  for (std::uint64_t k = top; k < last; ++k) {
    w[k + 1 - first_] = w[k - first_] * (static_cast<double>(trials - k) /
                                         static_cast<double>(k + 1)) * odds;
  }
  for (std::uint64_t k = top; k > first_; --k) {
    w[k - 1 - first_] = w[k - first_] * (static_cast<double>(k) /
                                         static_cast<double>(trials - k + 1)) / odds;
  }
  double total = 0.0;
  for (double x : w) total += x;
  cumulative_.resize(w.size());
  double running = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    running += w[i];
    cumulative_[i] = running / total;
  }
  cumulative_.back() = 1.0;
}

std::uint64_t BinomialSampler::draw(Xoshiro256& rng) const {
  const double u = rng.uniform01();
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  return first_ + static_cast<std::uint64_t>(it - cumulative_.begin());
}

double BinomialSampler::cdf(std::uint64_t s) const {
  if (s < first_) return 0.0;
  const std::uint64_t i = s - first_;
  return i >= cumulative_.size() ? 1.0 : cumulative_[i];
}

void SimConfig::validate() const {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(Errc::kProbabilityOutOfRange,
                "simulation p must lie in (0, 1), got " + std::to_string(p));
  }
  if (n_max == 0) throw Error(Errc::kInvalidConfig, "n_max must be >= 1");
  if (record_stride == 0) {
    throw Error(Errc::kInvalidConfig, "record_stride must be >= 1");
  }
  if (replications == 0) {
    throw Error(Errc::kInvalidConfig, "replications must be >= 1");
  }
}

Trajectory run_trajectory(const SimConfig& cfg, std::uint64_t rep_index) {
  cfg.validate();
  Trajectory traj;
  traj.seed = derive_seed(cfg.master_seed, rep_index);
  const std::uint64_t expected =
      std::min(cfg.n_max, cfg.dense_until) + cfg.n_max / cfg.record_stride + 1;
  traj.records.reserve(expected);

  const DiscreteDistribution& d = cfg.distribution;
  Xoshiro256 rng(traj.seed);
  InverseCdfSampler sampler(d);
  EmpiricalSample sample(d);
  for (std::uint64_t n = 1; n <= cfg.n_max; ++n) {
    sample.insert_index(sampler.draw_index(rng));
    if (cfg.records(n)) {
      const auto [l, r] = sample.quantile_indices(cfg.p);
      traj.records.push_back({n, d.value(l), d.value(r)});
    }
  }
  return traj;
}

std::uint64_t SwitchStats::visits_of(double value) const {
  for (const AtomVisits& v : visits) {
    if (v.value == value) return v.visits;
  }
  return 0;
}

SwitchStats switch_stats(const Trajectory& traj, std::uint64_t burn_in) {
  auto first = std::find_if(traj.records.begin(), traj.records.end(),
                            [&](const TrajectoryRecord& r) { return r.n >= burn_in; });
  if (first == traj.records.end()) {
    throw Error(Errc::kEmptyWindow,
                "no records at or after burn-in " + std::to_string(burn_in));
  }
  SwitchStats stats;
  std::map<double, AtomVisits> by_value;
  stats.running_min = first->lq;
  stats.running_max = first->lq;
  const TrajectoryRecord* prev = nullptr;
  for (auto it = first; it != traj.records.end(); ++it) {
    const double v = it->lq;
    auto& slot = by_value.try_emplace(v, AtomVisits{v, 0, 0}).first->second;
    ++slot.visits;
    if (prev == nullptr || prev->lq != v) ++slot.entries;
    if (prev != nullptr && prev->lq != v) ++stats.switch_count;
    stats.running_min = std::min(stats.running_min, v);
    stats.running_max = std::max(stats.running_max, v);
    ++stats.window_records;
    prev = &*it;
  }
  for (auto& [value, v] : by_value) stats.visits.push_back(v);
  return stats;
}

bool sandwich_check(const Trajectory& traj, const DiscreteDistribution& d,
                    double p, double epsilon, std::uint64_t burn_in) {
  if (!(epsilon > 0.0)) {
    throw Error(Errc::kParameterOutOfRange, "epsilon must be positive");
  }
  const QuantilePair q = quantile_pair(d, p);
  auto inside = [&](double v) {
    return (v > q.left - epsilon && v <= q.left) ||
           (v >= q.right && v < q.right + epsilon);
  };
  bool any = false;
  bool ok = true;
  for (const TrajectoryRecord& r : traj.records) {
    if (r.n < burn_in) continue;
    any = true;
    ok = ok && inside(r.lq) && inside(r.rq);
  }
  if (!any) {
    throw Error(Errc::kEmptyWindow,
                "no records at or after burn-in " + std::to_string(burn_in));
  }
  return ok;
}

std::uint64_t gap_violations(const Trajectory& traj,
                             const DiscreteDistribution& d, double p) {
  const QuantilePair q = quantile_pair(d, p);
  std::uint64_t count = 0;
  for (const TrajectoryRecord& r : traj.records) {
    count += (r.lq > q.left && r.lq < q.right) ? 1 : 0;
    count += (r.rq > q.left && r.rq < q.right) ? 1 : 0;
  }
  return count;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> BlockSchedule::entries()
    const {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::size_t i = 0; i + 1 < indices.size(); i += 2) {
    out.emplace_back(indices[i], indices[i + 1]);
  }
  return out;
}

BlockSchedule block_schedule(const BEParams& params, double alpha,
                             std::uint64_t k_max, std::uint64_t n_cap) {
  if (k_max == 0) throw Error(Errc::kParameterOutOfRange, "k_max must be >= 1");
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(Errc::kParameterOutOfRange, "alpha must lie in (0, 1/2)");
  }
  BlockSchedule sched;
  sched.alpha = alpha;
  sched.k_max = k_max;
  if (n_cap < 1) return sched;
  sched.indices.push_back(1);
  // Advances the last index by phi(last); false once the cap is passed.
  auto advance = [&]() {
    const std::uint64_t from = sched.indices.back();
    std::uint64_t step = 0;
    try {
      step = phi_of_k(params, from, alpha).phi;
    } catch (const Error& e) {
      if (e.code() == Errc::kParameterOutOfRange) return false;  // beyond 2^62
      throw;
    }
    if (step > n_cap - from) return false;
    sched.indices.push_back(from + step);
    return true;
  };
  while (sched.indices.size() / 2 < k_max) {
    if (!advance()) break;                      // m_k
    if (sched.indices.size() / 2 >= k_max) break;
    if (!advance()) break;                      // n_{k+1}
  }
  return sched;
}

DeviationResult deviation_experiment(double q, std::uint64_t k, double alpha,
                                     std::uint64_t reps,
                                     std::uint64_t master_seed) {
  if (reps == 0) throw Error(Errc::kParameterOutOfRange, "reps must be >= 1");
  const DiscreteDistribution coin = bernoulli(q);
  DeviationResult out;
  out.phi = phi_of_k(bernoulli_moments(q), k, alpha);
  out.reps = reps;
  InverseCdfSampler sampler(coin);
  const double centre = static_cast<double>(out.phi.phi) * q;
  const double kd = static_cast<double>(k);
  for (std::uint64_t r = 0; r < reps; ++r) {
    Xoshiro256 rng(derive_seed(master_seed, r));
    std::uint64_t sum = 0;
    for (std::uint64_t i = 0; i < out.phi.phi; ++i) sum += sampler.draw_index(rng);
    const double dev = static_cast<double>(sum) - centre;
    out.low_count += dev < -kd ? 1 : 0;
    out.high_count += dev > kd ? 1 : 0;
  }
  out.freq_low = static_cast<double>(out.low_count) / static_cast<double>(reps);
  out.freq_high = static_cast<double>(out.high_count) / static_cast<double>(reps);
  return out;
}

BlockEventResult block_event_experiment(double q, double alpha,
                                        std::uint64_t reps,
                                        std::uint64_t master_seed) {
  if (reps == 0) throw Error(Errc::kParameterOutOfRange, "reps must be >= 1");
  const BEParams params = bernoulli_moments(q);
  BlockEventResult out;
  out.reps = reps;
  out.n1 = 1;
  out.m1 = out.n1 + phi_of_k(params, out.n1, alpha).phi;
  out.n2 = out.m1 + phi_of_k(params, out.m1, alpha).phi;

  const DiscreteDistribution coin = bernoulli(q);
  InverseCdfSampler sampler(coin);
  const BinomialSampler tail(out.n2 - out.m1, q);
  const std::uint64_t d_len = out.m1 - out.n1;
  const double d_centre = static_cast<double>(d_len) * q;
  const double e_centre = static_cast<double>(out.n2 - out.m1) * q;
  for (std::uint64_t r = 0; r < reps; ++r) {
    Xoshiro256 rng(derive_seed(master_seed, r));
    std::uint64_t d_sum = 0;
    for (std::uint64_t i = 0; i < d_len; ++i) d_sum += sampler.draw_index(rng);
    const std::uint64_t e_sum = tail.draw(rng);
    const bool d_event =
        static_cast<double>(d_sum) - d_centre < -static_cast<double>(out.n1);
    const bool e_event =
        static_cast<double>(e_sum) - e_centre > static_cast<double>(out.m1);
    out.d_count += d_event ? 1 : 0;
    out.e_count += e_event ? 1 : 0;
    out.c_count += (d_event && e_event) ? 1 : 0;
  }
  const double n = static_cast<double>(reps);
  out.freq_d = static_cast<double>(out.d_count) / n;
  out.freq_e = static_cast<double>(out.e_count) / n;
  out.freq_c = static_cast<double>(out.c_count) / n;
  return out;
}

std::string_view to_string(Analysis analysis) {
  switch (analysis) {
    case Analysis::kSwitchStats: return "switch_stats";
    case Analysis::kSandwich: return "sandwich_check";
    case Analysis::kConvergence: return "convergence";
  }
  return "unknown";
}

Analysis parse_analysis(std::string_view name) {
  if (name == "switch_stats" || name == "switch") return Analysis::kSwitchStats;
  if (name == "sandwich_check" || name == "sandwich") return Analysis::kSandwich;
  if (name == "convergence") return Analysis::kConvergence;
  throw Error(Errc::kInvalidConfig, "unknown analysis '" + std::string(name) + "'");
}

ReplicationResult analyze_trajectory(const Trajectory& traj,
                                     const SimConfig& cfg,
                                     const AnalysisOptions& options,
                                     std::uint64_t rep_index) {
  const QuantilePair target = quantile_pair(cfg.distribution, cfg.p);
  ReplicationResult res;
  res.rep_index = rep_index;
  res.seed = traj.seed;
  if (traj.records.empty()) throw Error(Errc::kEmptyWindow, "empty trajectory");
  res.final_record = traj.records.back();
  res.gap_violations = gap_violations(traj, cfg.distribution, cfg.p);

  switch (options.kind) {
    case Analysis::kConvergence:
      res.pass = res.final_record.lq == target.left &&
                 res.final_record.rq == target.right;
      break;
    case Analysis::kSwitchStats:
    case Analysis::kSandwich: {
      SwitchStats stats = switch_stats(traj, options.burn_in);
      res.oscillates = stats.running_min == target.left &&
                       stats.running_max == target.right &&
                       stats.visits_of(target.left) >= options.min_visits &&
                       stats.visits_of(target.right) >= options.min_visits;
      if (options.kind == Analysis::kSwitchStats) {
        res.pass = stats.switch_count >= options.min_switches;
      } else {
        res.sandwich = sandwich_check(traj, cfg.distribution, cfg.p,
                                      options.epsilon, options.burn_in);
        res.pass = *res.sandwich;
      }
      res.stats = std::move(stats);
      break;
    }
  }
  return res;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("QL_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ReplicatedReport run_replicated(const SimConfig& cfg,
                                const AnalysisOptions& options,
                                const TrajectorySink& sink, unsigned threads) {
  cfg.validate();
  if (options.kind == Analysis::kSandwich && !(options.epsilon > 0.0)) {
    throw Error(Errc::kInvalidConfig, "epsilon must be positive");
  }
  ReplicatedReport report{cfg, options, quantile_pair(cfg.distribution, cfg.p), {}, 0, 0, 0};
  report.replications.resize(cfg.replications);

  std::vector<std::exception_ptr> failures(cfg.replications);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (std::uint64_t i = next++; i < cfg.replications; i = next++) {
      try {
        const Trajectory traj = run_trajectory(cfg, i);
        report.replications[i] = analyze_trajectory(traj, cfg, options, i);
        if (sink) sink(i, traj);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, cfg.replications));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::uint64_t i = 0; i < cfg.replications; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "replication " + std::to_string(i) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("replication " + std::to_string(i) + ": " +
                               e.what());
    }
  }

  for (const ReplicationResult& r : report.replications) {
    report.pass_count += r.pass ? 1 : 0;
    report.oscillation_count += r.oscillates ? 1 : 0;
    report.gap_violation_total += r.gap_violations;
  }
  return report;
}

}  // namespace qlim
