#ifndef QLIM_TRANSFORMS_HPP_
#define QLIM_TRANSFORMS_HPP_

#include <string_view>

#include "qlim/distribution.hpp"

namespace qlim {

// Maps used to move a distribution with a quantile gap at p, i.e.
// lq(p) < rq(p), onto a simpler one.  Mass strictly inside the gap is
// zero, so both maps are only defined outside (lq, rq).
//
//   binarize:       x <= lq -> 0,  x >= rq -> 1
//   collapse_shift: x <= lq -> x,  x >= rq -> x - h,  h = rq - lq
enum class TransformKind { kBinarize, kCollapseShift };

std::string_view to_string(TransformKind kind);
// Accepts "binarize" and "collapse_shift"; kParameterOutOfRange otherwise.
TransformKind parse_transform_kind(std::string_view name);

struct TransformSpec {
  TransformKind kind;
  double p;
  double lq;
  double rq;
  double h;  // rq - lq
};

// Reads the gap of d at p.  Throws kProbabilityOutOfRange unless 0 < p < 1
// and kNoQuantileGap when the quantiles coincide.
TransformSpec make_transform_spec(TransformKind kind,
                                  const DiscreteDistribution& d, double p);

// Throws kValueInGap for lq < x < rq.
int binarize_value(const TransformSpec& spec, double x);
double collapse_shift_value(const TransformSpec& spec, double x);

// Two-point law on {0, 1} with P(0) = F(lq) = p.
DiscreteDistribution binarize(const DiscreteDistribution& d, double p);

// Shifted law, colliding atoms merged.  Its left and right quantiles at p
// both equal lq(p) of the input.
DiscreteDistribution collapse_shift(const DiscreteDistribution& d, double p);

}  // namespace qlim

#endif  // QLIM_TRANSFORMS_HPP_
