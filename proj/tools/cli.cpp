#include "cli.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qlim/berry_esseen.hpp"
#include "qlim/distribution.hpp"
#include "qlim/empirical.hpp"
#include "qlim/errors.hpp"
#include "qlim/io.hpp"
#include "qlim/rng.hpp"
#include "qlim/simulator.hpp"
#include "qlim/transforms.hpp"

namespace qlim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised for bad flag combinations the parser itself cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string family;
  std::optional<double> family_q;
  std::string dist_file;

  double p = 0.5;
  std::uint64_t n = 0;
  std::uint64_t n_max = 0;
  std::uint64_t replications = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t record_stride = 10;
  std::uint64_t dense_until = 10000;
  std::string analysis = "switch_stats";
  std::uint64_t burn_in = 0;
  double epsilon = 0.1;
  std::uint64_t min_switches = 10;
  std::uint64_t min_visits = 3;
  std::string output_dir;
  bool force = false;

  double q = 0.5;
  double alpha = 0.25;
  std::uint64_t k = 1;
  std::uint64_t reps = 10000;

  std::optional<double> mu;
  std::optional<double> sigma;
  std::optional<double> rho;
  std::optional<double> z1;
  std::optional<double> z2;

  std::string kind;
  std::string format;
};

CLI::Validator open_interval(double lo, double hi) {
  std::ostringstream desc;
  desc << "in (" << lo << ", " << hi << ")";
  return CLI::Validator(
      [lo, hi](std::string& input) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(input, v) || !(v > lo && v < hi)) {
          std::ostringstream msg;
          msg << "Value " << input << " not in open interval (" << lo << ", "
              << hi << ")";
          return msg.str();
        }
        return {};
      },
      desc.str());
}

void add_dist_options(CLI::App* sub, CliConfig& cfg) {
  auto* family = sub->add_option("--family", cfg.family, "Built-in distribution")
                     ->check(CLI::IsMember({"coin", "bernoulli", "figure"}));
  auto* file = sub->add_option("--dist", cfg.dist_file,
                               "JSON distribution spec file")
                   ->check(CLI::ExistingFile);
  family->excludes(file);
  file->excludes(family);
  sub->add_option("--family-q", cfg.family_q,
                  "P(1) for --family bernoulli")
      ->check(open_interval(0.0, 1.0));
}

DiscreteDistribution resolve_distribution(const CliConfig& cfg) {
  if (!cfg.dist_file.empty()) return io::load_distribution(cfg.dist_file);
  if (cfg.family.empty()) {
    throw UsageError("one of --family or --dist is required");
  }
  json doc = {{"family", cfg.family}};
  if (cfg.family == "bernoulli") {
    if (!cfg.family_q) throw UsageError("--family bernoulli needs --family-q");
    doc["q"] = *cfg.family_q;
  }
  return io::distribution_from_json(doc);
}

BEParams resolve_moments(const CliConfig& cfg, bool q_given) {
  const bool any_moment = cfg.mu || cfg.sigma || cfg.rho;
  if (any_moment) {
    if (q_given) throw UsageError("--q cannot be combined with --mu/--sigma/--rho");
    if (!cfg.mu || !cfg.sigma || !cfg.rho) {
      throw UsageError("--mu, --sigma and --rho must be given together");
    }
    return make_be_params(*cfg.mu, *cfg.sigma, *cfg.rho);
  }
  return bernoulli_moments(cfg.q);
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

std::string csv_real(double x) { return io::format_real(x); }

int cmd_quantile(const CliConfig& cfg, std::ostream& out) {
  const DiscreteDistribution d = resolve_distribution(cfg);
  const QuantilePair q = quantile_pair(d, cfg.p);
  std::optional<SolutionInterval> interval;
  if (cfg.p > 0.0 && cfg.p < 1.0) interval = solution_interval(d, cfg.p);

  if (cfg.format == "json") {
    json doc = {{"quantile", io::to_json(q)},
                {"solution_interval",
                 interval ? io::to_json(*interval) : json(nullptr)}};
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  out << "p,left,right,coincide,interval_lo,interval_hi,unique\n";
  out << csv_real(q.p) << ',' << csv_real(q.left) << ',' << csv_real(q.right)
      << ',' << bool_text(q.coincide) << ',';
  if (interval) {
    out << csv_real(interval->lo) << ',' << csv_real(interval->hi) << ','
        << bool_text(interval->unique);
  } else {
    out << ",,";
  }
  out << '\n';
  return kExitOk;
}

int cmd_simulate(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  SimConfig sim{resolve_distribution(cfg)};
  sim.p = cfg.p;
  sim.n_max = cfg.n_max;
  sim.master_seed = cfg.master_seed;
  sim.record_stride = cfg.record_stride;
  sim.dense_until = cfg.dense_until;
  sim.replications = cfg.replications;
  sim.validate();

  AnalysisOptions opt;
  opt.kind = parse_analysis(cfg.analysis);
  opt.burn_in = cfg.burn_in;
  opt.epsilon = cfg.epsilon;
  opt.min_switches = cfg.min_switches;
  opt.min_visits = cfg.min_visits;
  if (opt.kind != Analysis::kConvergence && opt.burn_in > sim.n_max) {
    throw UsageError("--burn-in must not exceed --n-max");
  }

  const fs::path dir(cfg.output_dir);
  std::vector<fs::path> targets;
  for (std::uint64_t i = 0; i < sim.replications; ++i) {
    targets.push_back(dir / ("traj_" + std::to_string(i) + ".csv"));
  }
  targets.push_back(dir / "report.json");
  if (!cfg.force) {
    for (const fs::path& t : targets) {
      if (fs::exists(t)) {
        throw UsageError(t.string() + " exists; pass --force to overwrite");
      }
    }
  }

  std::vector<std::string> csv(sim.replications);
  const ReplicatedReport report = run_replicated(
      sim, opt, [&](std::uint64_t i, const Trajectory& t) {
        csv[i] = io::trajectory_csv(t);
      });
  std::vector<std::string> contents = std::move(csv);
  contents.push_back(io::report_to_json(report).dump(2) + "\n");

  // Nothing is written until every replication succeeded; a failed write
  // removes whatever this run already produced.
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create " << dir.string() << ": " << ec.message() << '\n';
    return kExitInternal;
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    std::ofstream f(targets[i], std::ios::binary | std::ios::trunc);
    f << contents[i];
    f.close();
    if (!f) {
      err << "error: failed writing " << targets[i].string() << '\n';
      for (std::size_t j = 0; j <= i; ++j) fs::remove(targets[j], ec);
      return kExitInternal;
    }
  }

  out << "analysis=" << to_string(opt.kind)
      << " replications=" << sim.replications
      << " pass_count=" << report.pass_count;
  if (opt.kind != Analysis::kConvergence) {
    out << " oscillation_count=" << report.oscillation_count;
  }
  out << " gap_violations=" << report.gap_violation_total
      << " output_dir=" << dir.string() << '\n';
  return kExitOk;
}

int cmd_blocks(const CliConfig& cfg, std::ostream& out) {
  const DeviationResult dev =
      deviation_experiment(cfg.q, cfg.k, cfg.alpha, cfg.reps, cfg.master_seed);
  const BlockEventResult blk =
      block_event_experiment(cfg.q, cfg.alpha, cfg.reps, cfg.master_seed);

  if (cfg.format == "json") {
    json doc = {
        {"config", {{"q", cfg.q}, {"alpha", cfg.alpha}, {"k", cfg.k},
                    {"reps", cfg.reps}, {"master_seed", cfg.master_seed}}},
        {"n1", dev.phi.n1},
        {"n2", dev.phi.n2},
        {"phi", dev.phi.phi},
        {"deviation", io::to_json(dev)},
        {"block_event", io::to_json(blk)},
    };
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  out << "q,alpha,k,n1,n2,phi,reps,freq_low,freq_high,"
         "block_n1,block_m1,block_n2,freq_d,freq_e,freq_c\n";
  out << csv_real(cfg.q) << ',' << csv_real(cfg.alpha) << ',' << cfg.k << ','
      << dev.phi.n1 << ',' << dev.phi.n2 << ',' << dev.phi.phi << ','
      << cfg.reps << ',' << csv_real(dev.freq_low) << ','
      << csv_real(dev.freq_high) << ',' << blk.n1 << ',' << blk.m1 << ','
      << blk.n2 << ',' << csv_real(blk.freq_d) << ',' << csv_real(blk.freq_e)
      << ',' << csv_real(blk.freq_c) << '\n';
  return kExitOk;
}

int cmd_be_bound(const CliConfig& cfg, bool q_given, std::ostream& out) {
  const BEParams params = resolve_moments(cfg, q_given);
  const double bound = be_bound(params, cfg.n);
  std::optional<ProbBracket> bracket;
  if (cfg.z1 || cfg.z2) {
    bracket = interval_prob_bounds(
        params, cfg.n, cfg.z1.value_or(-INFINITY), cfg.z2.value_or(INFINITY));
  }
  if (cfg.format == "json") {
    json doc = {{"params", io::to_json(params)}, {"n", cfg.n}, {"bound", bound}};
    if (bracket) {
      doc["z1"] = io::real_to_json(cfg.z1.value_or(-INFINITY));
      doc["z2"] = io::real_to_json(cfg.z2.value_or(INFINITY));
      doc["lo"] = bracket->lo;
      doc["hi"] = bracket->hi;
    }
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  out << "n,mu,sigma,rho,bound";
  if (bracket) out << ",z1,z2,lo,hi";
  out << '\n' << cfg.n << ',' << csv_real(params.mu) << ','
      << csv_real(params.sigma) << ',' << csv_real(params.rho) << ','
      << csv_real(bound);
  if (bracket) {
    out << ',' << csv_real(cfg.z1.value_or(-INFINITY)) << ','
        << csv_real(cfg.z2.value_or(INFINITY)) << ',' << csv_real(bracket->lo)
        << ',' << csv_real(bracket->hi);
  }
  out << '\n';
  return kExitOk;
}

int cmd_phi_of_k(const CliConfig& cfg, bool q_given, std::ostream& out) {
  const BEParams params = resolve_moments(cfg, q_given);
  const PhiOfK phi = phi_of_k(params, cfg.k, cfg.alpha);
  if (cfg.format == "json") {
    json doc = io::to_json(phi);
    doc["params"] = io::to_json(params);
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  out << "k,alpha,n1,n2,phi\n"
      << phi.k << ',' << csv_real(phi.alpha) << ',' << phi.n1 << ',' << phi.n2
      << ',' << phi.phi << '\n';
  return kExitOk;
}

void print_atoms_text(std::ostream& out, const DiscreteDistribution& d) {
  for (const Atom& a : d.atoms()) {
    out << "  " << csv_real(a.value) << "\t" << csv_real(a.prob) << '\n';
  }
}

int cmd_transform(const CliConfig& cfg, std::ostream& out) {
  const DiscreteDistribution d = resolve_distribution(cfg);
  const TransformKind kind = parse_transform_kind(cfg.kind);
  const TransformSpec spec = make_transform_spec(kind, d, cfg.p);
  const DiscreteDistribution result = kind == TransformKind::kBinarize
                                          ? binarize(d, cfg.p)
                                          : collapse_shift(d, cfg.p);
  const QuantilePair before = quantile_pair(d, cfg.p);
  const QuantilePair after = quantile_pair(result, cfg.p);

  if (cfg.format == "json") {
    json doc = {{"kind", std::string(to_string(kind))},
                {"p", cfg.p},
                {"lq", spec.lq},
                {"rq", spec.rq},
                {"h", spec.h},
                {"input", io::distribution_to_json(d)},
                {"output", io::distribution_to_json(result)},
                {"quantiles_before", io::to_json(before)},
                {"quantiles_after", io::to_json(after)}};
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  if (cfg.format == "csv") {
    out << "stage,x,p,left,right\n";
    auto rows = [&](const char* stage, const DiscreteDistribution& dist,
                    const QuantilePair& q) {
      for (const Atom& a : dist.atoms()) {
        out << stage << ',' << csv_real(a.value) << ',' << csv_real(a.prob)
            << ',' << csv_real(q.left) << ',' << csv_real(q.right) << '\n';
      }
    };
    rows("input", d, before);
    rows("output", result, after);
    return kExitOk;
  }
  out << "transform " << to_string(kind) << " at p = " << csv_real(cfg.p)
      << " (lq " << csv_real(spec.lq) << ", rq " << csv_real(spec.rq)
      << ", h " << csv_real(spec.h) << ")\n";
  out << "input atoms (x, p):\n";
  print_atoms_text(out, d);
  out << "input quantiles: left " << csv_real(before.left) << ", right "
      << csv_real(before.right) << '\n';
  out << "output atoms (x, p):\n";
  print_atoms_text(out, result);
  out << "output quantiles: left " << csv_real(after.left) << ", right "
      << csv_real(after.right) << '\n';
  return kExitOk;
}

int cmd_gc(const CliConfig& cfg, std::ostream& out) {
  const DiscreteDistribution d = resolve_distribution(cfg);
  std::vector<std::uint64_t> checkpoints;
  for (std::uint64_t c = 10; c < cfg.n; c *= 10) checkpoints.push_back(c);
  checkpoints.push_back(cfg.n);

  Xoshiro256 rng(derive_seed(cfg.master_seed, 0));
  InverseCdfSampler sampler(d);
  EmpiricalSample sample(d);
  out << "n,gc_distance,witness\n";
  std::size_t next = 0;
  for (std::uint64_t i = 1; i <= cfg.n; ++i) {
    sample.insert_index(sampler.draw_index(rng));
    if (i == checkpoints[next]) {
      const GCDistance g = gc_distance(sample, d);
      out << i << ',' << csv_real(g.value) << ',' << csv_real(g.witness) << '\n';
      ++next;
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Exact left/right quantiles and sample-quantile limit experiments",
               "qlim"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto* quantile = app.add_subcommand("quantile", "Left/right quantiles at p");
  add_dist_options(quantile, cfg);
  quantile->add_option("--p", cfg.p, "Probability level")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  quantile->add_option("--format", cfg.format)
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_val("csv");

  auto* simulate = app.add_subcommand("simulate", "Seeded sample-quantile trajectories");
  add_dist_options(simulate, cfg);
  simulate->add_option("--p", cfg.p)->required()->check(open_interval(0.0, 1.0));
  simulate->add_option("--n-max,--n_max", cfg.n_max)
      ->required()
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
  simulate->add_option("--replications", cfg.replications)
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 24));
  simulate->add_option("--master-seed,--master_seed", cfg.master_seed);
  simulate->add_option("--record-stride,--record_stride", cfg.record_stride)
      ->check(CLI::PositiveNumber);
  simulate->add_option("--dense-until,--dense_until", cfg.dense_until);
  simulate->add_option("--analysis", cfg.analysis)
      ->check(CLI::IsMember({"switch_stats", "sandwich_check", "convergence"}));
  simulate->add_option("--burn-in,--burn_in", cfg.burn_in);
  simulate->add_option("--epsilon", cfg.epsilon)->check(CLI::PositiveNumber);
  simulate->add_option("--min-switches,--min_switches", cfg.min_switches);
  simulate->add_option("--min-visits,--min_visits", cfg.min_visits);
  simulate->add_option("--output-dir,--output_dir", cfg.output_dir)->required();
  simulate->add_flag("--force", cfg.force, "Overwrite existing output files");

  auto* blocks = app.add_subcommand("blocks", "Deviation lemma and block event experiments");
  blocks->add_option("--q", cfg.q)->required()->check(open_interval(0.0, 1.0));
  blocks->add_option("--alpha", cfg.alpha)->check(open_interval(0.0, 0.5));
  blocks->add_option("--k", cfg.k)->check(CLI::PositiveNumber);
  blocks->add_option("--reps", cfg.reps)
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 32));
  blocks->add_option("--master-seed,--master_seed", cfg.master_seed);
  blocks->add_option("--format", cfg.format)
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_val("csv");

  auto add_moment_options = [&](CLI::App* sub) {
    auto* q = sub->add_option("--q", cfg.q, "Bernoulli parameter (default 0.5)")
                  ->check(open_interval(0.0, 1.0));
    sub->add_option("--mu", cfg.mu)->excludes(q);
    sub->add_option("--sigma", cfg.sigma)->check(CLI::PositiveNumber)->excludes(q);
    sub->add_option("--rho", cfg.rho)->check(CLI::PositiveNumber)->excludes(q);
    sub->add_option("--format", cfg.format)
        ->check(CLI::IsMember({"csv", "json"}))
        ->default_val("csv");
    return q;
  };

  auto* be = app.add_subcommand("be-bound", "Berry-Esseen bound 3 rho / (sigma^3 sqrt(n))");
  auto* be_q = add_moment_options(be);
  be->add_option("--n", cfg.n)->required()->check(CLI::PositiveNumber);
  be->add_option("--z1", cfg.z1, "Lower standardized endpoint (may be -inf)");
  be->add_option("--z2", cfg.z2, "Upper standardized endpoint (may be inf)");

  auto* phi = app.add_subcommand("phi-of-k", "Sample size phi(k) of the deviation lemma");
  auto* phi_q = add_moment_options(phi);
  phi->add_option("--k", cfg.k)->required()->check(CLI::PositiveNumber);
  phi->add_option("--alpha", cfg.alpha)->check(open_interval(0.0, 0.5));

  auto* transform = app.add_subcommand("transform", "Binarize or collapse-shift a gapped distribution");
  add_dist_options(transform, cfg);
  transform->add_option("--p", cfg.p)->required()->check(open_interval(0.0, 1.0));
  transform->add_option("--kind", cfg.kind)
      ->required()
      ->check(CLI::IsMember({"binarize", "collapse_shift"}));
  transform->add_option("--format", cfg.format)
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->default_val("text");

  auto* gc = app.add_subcommand("gc", "Glivenko-Cantelli sup distance at checkpoints");
  add_dist_options(gc, cfg);
  gc->add_option("--n", cfg.n)
      ->required()
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
  gc->add_option("--master-seed,--master_seed", cfg.master_seed);

  std::vector<const char*> argv{"qlim"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (quantile->parsed()) return cmd_quantile(cfg, out);
    if (simulate->parsed()) return cmd_simulate(cfg, out, err);
    if (blocks->parsed()) return cmd_blocks(cfg, out);
    if (be->parsed()) return cmd_be_bound(cfg, be_q->count() > 0, out);
    if (phi->parsed()) return cmd_phi_of_k(cfg, phi_q->count() > 0, out);
    if (transform->parsed()) return cmd_transform(cfg, out);
    if (gc->parsed()) return cmd_gc(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace qlim::cli
