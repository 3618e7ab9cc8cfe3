#include "qlim/errors.hpp"

namespace qlim {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kEmptyDistribution: return "EmptyDistribution";
    case Errc::kNegativeProbability: return "NegativeProbability";
    case Errc::kProbabilitySumOutOfTolerance: return "ProbabilitySumOutOfTolerance";
    case Errc::kProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case Errc::kEmptySample: return "EmptySample";
    case Errc::kValueOutsideSupport: return "ValueOutsideSupport";
    case Errc::kParameterOutOfRange: return "ParameterOutOfRange";
    case Errc::kInvalidInterval: return "InvalidInterval";
    case Errc::kNoQuantileGap: return "NoQuantileGap";
    case Errc::kValueInGap: return "ValueInGap";
    case Errc::kEmptyWindow: return "EmptyWindow";
    case Errc::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace qlim
