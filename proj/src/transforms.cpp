#include "qlim/transforms.hpp"

#include <string>
#include <vector>

#include "qlim/errors.hpp"

namespace qlim {
namespace {

void check_outside_gap(const TransformSpec& spec, double x) {
  if (x > spec.lq && x < spec.rq) {
    throw Error(Errc::kValueInGap, std::to_string(x) + " lies inside (" +
                                       std::to_string(spec.lq) + ", " +
                                       std::to_string(spec.rq) + ")");
  }
}

}  // namespace

std::string_view to_string(TransformKind kind) {
  return kind == TransformKind::kBinarize ? "binarize" : "collapse_shift";
}

TransformKind parse_transform_kind(std::string_view name) {
  if (name == "binarize") return TransformKind::kBinarize;
  if (name == "collapse_shift") return TransformKind::kCollapseShift;
  throw Error(Errc::kParameterOutOfRange,
              "unknown transform kind '" + std::string(name) + "'");
}

TransformSpec make_transform_spec(TransformKind kind,
                                  const DiscreteDistribution& d, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(Errc::kProbabilityOutOfRange,
                "transforms need p in (0, 1), got " + std::to_string(p));
  }
  const QuantilePair q = quantile_pair(d, p);
  if (q.coincide) {
    throw Error(Errc::kNoQuantileGap, "left and right quantiles coincide at p = " +
                                          std::to_string(p));
  }
  return {kind, p, q.left, q.right, q.right - q.left};
}

int binarize_value(const TransformSpec& spec, double x) {
  check_outside_gap(spec, x);
  return x >= spec.rq ? 1 : 0;
}

double collapse_shift_value(const TransformSpec& spec, double x) {
  check_outside_gap(spec, x);
  if (x <= spec.lq) return x;
  // x - h written so that rq lands exactly on lq.
  return spec.lq + (x - spec.rq);
}

DiscreteDistribution binarize(const DiscreteDistribution& d, double p) {
  const TransformSpec spec = make_transform_spec(TransformKind::kBinarize, d, p);
  const double p0 = d.cdf(spec.lq);
  const Atom atoms[] = {{0.0, p0}, {1.0, 1.0 - p0}};
  return DiscreteDistribution::make(atoms);
}

DiscreteDistribution collapse_shift(const DiscreteDistribution& d, double p) {
  const TransformSpec spec =
      make_transform_spec(TransformKind::kCollapseShift, d, p);
  std::vector<Atom> shifted;
  shifted.reserve(d.size());
  for (const Atom& a : d.atoms()) {
    shifted.push_back({collapse_shift_value(spec, a.value), a.prob});
  }
  return DiscreteDistribution::make(shifted);
}

}  // namespace qlim
