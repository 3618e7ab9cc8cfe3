#include "qlim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qlim/errors.hpp"

namespace qlim::io {

using nlohmann::json;

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

json real_to_json(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

namespace {

double number_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw Error(Errc::kInvalidConfig,
                std::string("distribution spec needs numeric field '") + key + "'");
  }
  return obj.at(key).get<double>();
}

}  // namespace

DiscreteDistribution distribution_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw Error(Errc::kInvalidConfig, "distribution spec must be a JSON object");
  }
  if (doc.contains("atoms")) {
    const json& atoms = doc.at("atoms");
    if (!atoms.is_array()) {
      throw Error(Errc::kInvalidConfig, "'atoms' must be an array");
    }
    std::vector<Atom> pairs;
    for (const json& a : atoms) {
      if (!a.is_object()) throw Error(Errc::kInvalidConfig, "atom must be an object");
      pairs.push_back({number_field(a, "x"), number_field(a, "p")});
    }
    return DiscreteDistribution::make(pairs);
  }
  if (doc.contains("family") && doc.at("family").is_string()) {
    const std::string family = doc.at("family").get<std::string>();
    if (family == "coin") return fair_coin();
    if (family == "figure") return figure_instance();
    if (family == "bernoulli") return bernoulli(number_field(doc, "q"));
    throw Error(Errc::kInvalidConfig, "unknown family '" + family + "'");
  }
  throw Error(Errc::kInvalidConfig, "distribution spec needs 'atoms' or 'family'");
}

DiscreteDistribution load_distribution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kInvalidConfig, "cannot open " + path.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(Errc::kInvalidConfig, path.string() + " is not valid JSON");
  }
  return distribution_from_json(doc);
}

json distribution_to_json(const DiscreteDistribution& d) {
  json atoms = json::array();
  for (const Atom& a : d.atoms()) atoms.push_back({{"x", a.value}, {"p", a.prob}});
  return {{"atoms", std::move(atoms)}};
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "n,lq,rq\n";
  out.reserve(out.size() + traj.records.size() * 16);
  for (const TrajectoryRecord& r : traj.records) {
    out += std::to_string(r.n);
    out += ',';
    out += format_real(r.lq);
    out += ',';
    out += format_real(r.rq);
    out += '\n';
  }
  return out;
}

json to_json(const QuantilePair& q) {
  return {{"p", q.p},
          {"left", real_to_json(q.left)},
          {"right", real_to_json(q.right)},
          {"coincide", q.coincide}};
}

json to_json(const SolutionInterval& s) {
  return {{"lo", real_to_json(s.lo)}, {"hi", real_to_json(s.hi)}, {"unique", s.unique}};
}

json to_json(const PhiOfK& phi) {
  return {{"k", phi.k}, {"alpha", phi.alpha}, {"n1", phi.n1}, {"n2", phi.n2},
          {"phi", phi.phi}};
}

json to_json(const BEParams& params) {
  return {{"mu", params.mu}, {"sigma", params.sigma}, {"rho", params.rho}};
}

json to_json(const SwitchStats& stats) {
  json visits = json::array();
  for (const AtomVisits& v : stats.visits) {
    visits.push_back({{"value", v.value}, {"visits", v.visits}, {"entries", v.entries}});
  }
  return {{"window_records", stats.window_records},
          {"switch_count", stats.switch_count},
          {"running_min", stats.running_min},
          {"running_max", stats.running_max},
          {"visits", std::move(visits)}};
}

json to_json(const DeviationResult& r) {
  json out = to_json(r.phi);
  out["reps"] = r.reps;
  out["low_count"] = r.low_count;
  out["high_count"] = r.high_count;
  out["freq_low"] = r.freq_low;
  out["freq_high"] = r.freq_high;
  return out;
}

json to_json(const BlockEventResult& r) {
  return {{"n1", r.n1},           {"m1", r.m1},           {"n2", r.n2},
          {"reps", r.reps},       {"d_count", r.d_count}, {"e_count", r.e_count},
          {"c_count", r.c_count}, {"freq_d", r.freq_d},   {"freq_e", r.freq_e},
          {"freq_c", r.freq_c}};
}

json to_json(const BlockSchedule& s) {
  json entries = json::array();
  for (auto [n, m] : s.entries()) entries.push_back({{"n", n}, {"m", m}});
  return {{"alpha", s.alpha}, {"k_max", s.k_max}, {"indices", s.indices},
          {"entries", std::move(entries)}};
}

json report_to_json(const ReplicatedReport& report) {
  const SimConfig& cfg = report.config;
  const AnalysisOptions& opt = report.options;
  json config = {
      {"distribution", distribution_to_json(cfg.distribution)},
      {"p", cfg.p},
      {"n_max", cfg.n_max},
      {"master_seed", cfg.master_seed},
      {"record_stride", cfg.record_stride},
      {"dense_until", cfg.dense_until},
      {"replications", cfg.replications},
      {"analysis", std::string(to_string(opt.kind))},
      {"burn_in", opt.burn_in},
      {"epsilon", opt.epsilon},
      {"min_switches", opt.min_switches},
      {"min_visits", opt.min_visits},
  };

  json reps = json::array();
  for (const ReplicationResult& r : report.replications) {
    json row = {
        {"rep_index", r.rep_index},
        {"seed", r.seed},
        {"pass", r.pass},
        {"final", {{"n", r.final_record.n},
                   {"lq", real_to_json(r.final_record.lq)},
                   {"rq", real_to_json(r.final_record.rq)}}},
        {"gap_violations", r.gap_violations},
    };
    if (r.stats) {
      row["stats"] = to_json(*r.stats);
      row["oscillates"] = r.oscillates;
    }
    if (r.sandwich) row["sandwich"] = *r.sandwich;
    reps.push_back(std::move(row));
  }

  json aggregate = {{"replications", report.replications.size()},
                    {"pass_count", report.pass_count},
                    {"gap_violation_total", report.gap_violation_total}};
  if (opt.kind != Analysis::kConvergence) {
    aggregate["oscillation_count"] = report.oscillation_count;
  }
  return {{"config", std::move(config)},
          {"target", to_json(report.target)},
          {"replications", std::move(reps)},
          {"aggregate", std::move(aggregate)}};
}

}  // namespace qlim::io
