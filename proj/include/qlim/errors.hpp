#ifndef QLIM_ERRORS_HPP_
#define QLIM_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qlim {

enum class Errc {
  kEmptyDistribution,
  kNegativeProbability,
  kProbabilitySumOutOfTolerance,
  kProbabilityOutOfRange,
  kEmptySample,
  kValueOutsideSupport,
  kParameterOutOfRange,
  kInvalidInterval,
  kNoQuantileGap,
  kValueInGap,
  kEmptyWindow,
  kInvalidConfig,
};

std::string_view to_string(Errc code);

// All recoverable failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qlim

#endif  // QLIM_ERRORS_HPP_
