#ifndef QLIM_SIMULATOR_HPP_
#define QLIM_SIMULATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qlim/berry_esseen.hpp"
#include "qlim/distribution.hpp"
#include "qlim/rng.hpp"

namespace qlim {

// Inverse-CDF draws from a discrete law: each uniform u in (0, 1) maps to
// left_quantile(d, u).  Holds a reference; d must outlive the sampler.
class InverseCdfSampler {
 public:
  explicit InverseCdfSampler(const DiscreteDistribution& d) : d_(&d) {}

  std::size_t draw_index(Xoshiro256& rng) const;
  double draw(Xoshiro256& rng) const { return d_->value(draw_index(rng)); }

 private:
  const DiscreteDistribution* d_;
};

// n draws from d driven by Xoshiro256(seed).
std::vector<double> sample_stream(const DiscreteDistribution& d,
                                  std::uint64_t seed, std::uint64_t n);

// Exact Binomial(trials, q) variates by inverse CDF over a pmf table built
// by the ratio recurrence from the mode.  Mass further than 40 standard
// deviations from the mean underflows and is dropped.
class BinomialSampler {
 public:
  BinomialSampler(std::uint64_t trials, double q);

  std::uint64_t draw(Xoshiro256& rng) const;
  std::uint64_t trials() const { return trials_; }
  // P(S <= s) from the table.
  double cdf(std::uint64_t s) const;

 private:
  std::uint64_t trials_;
  std::uint64_t first_;            // smallest tabulated outcome
  std::vector<double> cumulative_;  // P(S <= first_ + i)
};

struct SimConfig {
  DiscreteDistribution distribution;
  double p = 0.5;
  std::uint64_t n_max = 1;
  std::uint64_t master_seed = 0;
  // Record every record_stride-th n, every n <= dense_until, and n_max.
  std::uint64_t record_stride = 1;
  std::uint64_t dense_until = 0;
  std::uint64_t replications = 1;

  // Throws kInvalidConfig / kProbabilityOutOfRange.
  void validate() const;
  bool records(std::uint64_t n) const {
    return n <= dense_until || n % record_stride == 0 || n == n_max;
  }
};

struct TrajectoryRecord {
  std::uint64_t n;
  double lq;
  double rq;

  friend bool operator==(const TrajectoryRecord&,
                         const TrajectoryRecord&) = default;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::uint64_t seed = 0;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Streams cfg.n_max draws (seeded by derive_seed(master_seed, rep_index))
// through an EmpiricalSample and records (n, lq_n, rq_n) per cfg.records.
Trajectory run_trajectory(const SimConfig& cfg, std::uint64_t rep_index);

struct AtomVisits {
  double value;
  std::uint64_t visits;   // records with lq_n == value
  std::uint64_t entries;  // maximal runs of consecutive such records
};

struct SwitchStats {
  std::uint64_t window_records = 0;
  std::uint64_t switch_count = 0;  // records where lq_n changed
  std::vector<AtomVisits> visits;  // sorted by value
  double running_min = 0.0;
  double running_max = 0.0;

  std::uint64_t visits_of(double value) const;
};

// Statistics of lq_n over records with n >= burn_in.  kEmptyWindow if no
// record qualifies.
SwitchStats switch_stats(const Trajectory& traj, std::uint64_t burn_in);

// True iff every lq_n, rq_n with n >= burn_in lies in
// (lq - epsilon, lq] or [rq, rq + epsilon), lq/rq being d's quantiles at p.
// kParameterOutOfRange for epsilon <= 0, kEmptyWindow for an empty window.
bool sandwich_check(const Trajectory& traj, const DiscreteDistribution& d,
                    double p, double epsilon, std::uint64_t burn_in);

// Number of recorded values (lq or rq, any n) strictly inside
// (lq(p), rq(p)) of d; 0 when the quantiles coincide.
std::uint64_t gap_violations(const Trajectory& traj,
                             const DiscreteDistribution& d, double p);

// Index schedule n_1 = 1, m_k = n_k + phi(n_k), n_{k+1} = m_k + phi(m_k).
// Stored flat as [n_1, m_1, n_2, m_2, ...]; generation stops once k_max
// (n_k, m_k) pairs exist or the next index would exceed n_cap.
struct BlockSchedule {
  std::vector<std::uint64_t> indices;
  double alpha = 0.0;
  std::uint64_t k_max = 0;

  // Complete (n_k, m_k) pairs.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> entries() const;
};

BlockSchedule block_schedule(const BEParams& params, double alpha,
                             std::uint64_t k_max, std::uint64_t n_cap);

struct DeviationResult {
  PhiOfK phi;
  std::uint64_t reps = 0;
  std::uint64_t low_count = 0;   // S - phi q < -k
  std::uint64_t high_count = 0;  // S - phi q > k
  double freq_low = 0.0;
  double freq_high = 0.0;
};

// reps independent Bernoulli(q) blocks of length phi(k), drawn one by one.
DeviationResult deviation_experiment(double q, std::uint64_t k, double alpha,
                                     std::uint64_t reps,
                                     std::uint64_t master_seed);

struct BlockEventResult {
  std::uint64_t n1 = 0;
  std::uint64_t m1 = 0;
  std::uint64_t n2 = 0;
  std::uint64_t reps = 0;
  std::uint64_t d_count = 0;  // D_1: sum over (n1, m1] - (m1-n1) q < -n1
  std::uint64_t e_count = 0;  // E_1: sum over (m1, n2] - (n2-m1) q > m1
  std::uint64_t c_count = 0;  // C_1 = D_1 and E_1
  double freq_d = 0.0;
  double freq_e = 0.0;
  double freq_c = 0.0;
};

// First block pair of the schedule.  The D_1 block is drawn draw by draw;
// the E_1 block (length phi(m_1), ~1.3e7 for the fair coin) is drawn as a
// single binomial sum.
BlockEventResult block_event_experiment(double q, double alpha,
                                        std::uint64_t reps,
                                        std::uint64_t master_seed);

enum class Analysis { kSwitchStats, kSandwich, kConvergence };

std::string_view to_string(Analysis analysis);
Analysis parse_analysis(std::string_view name);

struct AnalysisOptions {
  Analysis kind = Analysis::kSwitchStats;
  std::uint64_t burn_in = 0;
  double epsilon = 0.1;
  std::uint64_t min_switches = 10;
  std::uint64_t min_visits = 3;  // "infinitely often" proxy
};

struct ReplicationResult {
  std::uint64_t rep_index = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  TrajectoryRecord final_record{};
  std::uint64_t gap_violations = 0;
  // Populated for switch and sandwich analyses.
  std::optional<SwitchStats> stats;
  // Population min/max equal lq(p)/rq(p), each visited >= min_visits times.
  bool oscillates = false;
  std::optional<bool> sandwich;
};

struct ReplicatedReport {
  SimConfig config;
  AnalysisOptions options;
  QuantilePair target{};
  std::vector<ReplicationResult> replications;
  std::uint64_t pass_count = 0;
  std::uint64_t oscillation_count = 0;
  std::uint64_t gap_violation_total = 0;
};

// Called once per replication with its trajectory, possibly from several
// threads at once (never twice for the same index).
using TrajectorySink =
    std::function<void(std::uint64_t rep_index, const Trajectory&)>;

// Runs cfg.replications trajectories on up to `threads` workers (0: take
// QL_THREADS or the hardware concurrency).  The report depends only on
// (cfg, options).  A failing replication is rethrown as Error with its
// index attached; the lowest failing index wins.
ReplicatedReport run_replicated(const SimConfig& cfg,
                                const AnalysisOptions& options,
                                const TrajectorySink& sink = {},
                                unsigned threads = 0);

ReplicationResult analyze_trajectory(const Trajectory& traj,
                                     const SimConfig& cfg,
                                     const AnalysisOptions& options,
                                     std::uint64_t rep_index);

// QL_THREADS if set to a positive integer, else hardware concurrency (>= 1).
unsigned default_thread_count();

}  // namespace qlim

#endif  // QLIM_SIMULATOR_HPP_
