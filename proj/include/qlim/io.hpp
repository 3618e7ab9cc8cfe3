#ifndef QLIM_IO_HPP_
#define QLIM_IO_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qlim/berry_esseen.hpp"
#include "qlim/distribution.hpp"
#include "qlim/empirical.hpp"
#include "qlim/simulator.hpp"
#include "qlim/transforms.hpp"

namespace qlim::io {

// Shortest round-trip decimal form; "inf" / "-inf" for infinities.
std::string format_real(double x);

// Distribution spec documents:
//   {"atoms": [{"x": <real>, "p": <real>}, ...]}
//   {"family": "coin"} | {"family": "bernoulli", "q": <real>} |
//   {"family": "figure"}
// Malformed documents throw Error(kInvalidConfig); bad numbers surface the
// DiscreteDistribution errors.
DiscreteDistribution distribution_from_json(const nlohmann::json& doc);
DiscreteDistribution load_distribution(const std::filesystem::path& path);
nlohmann::json distribution_to_json(const DiscreteDistribution& d);

// Header "n,lq,rq" and one row per record.
std::string trajectory_csv(const Trajectory& traj);

// JSON numbers cannot hold infinities; those are written as strings.
nlohmann::json real_to_json(double x);

nlohmann::json to_json(const QuantilePair& q);
nlohmann::json to_json(const SolutionInterval& s);
nlohmann::json to_json(const PhiOfK& phi);
nlohmann::json to_json(const BEParams& params);
nlohmann::json to_json(const SwitchStats& stats);
nlohmann::json to_json(const DeviationResult& r);
nlohmann::json to_json(const BlockEventResult& r);
nlohmann::json to_json(const BlockSchedule& s);

// {"config": ..., "target": ..., "replications": [...], "aggregate": ...}
nlohmann::json report_to_json(const ReplicatedReport& report);

}  // namespace qlim::io

#endif  // QLIM_IO_HPP_
