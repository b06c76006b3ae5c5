#pragma once

#include <span>

#include "engulf/function.hpp"

namespace engulf {

// D(y; x, p) = f(y) - f(x) - p.(y - x), the deviation of f at y from its
// supporting affine minorant at (x, p).  Nonnegative whenever p is a
// subgradient at x; its strict sublevel set in y is the section.
double bregman_gap(const FunctionSpec& f, const SubgradientPair& base, std::span<const double> y);

// (p - q).(x - y) for two subgradient pairs; always >= 0 and algebraically
// equal to bregman_gap(a -> b) + bregman_gap(b -> a).
double monotone_gap(const FunctionSpec& f, const SubgradientPair& a, const SubgradientPair& b);

// Slacks of the two-sided monotonicity characterization at constant K:
//   lower_slack = M - (K+1)/K * D,   upper_slack = (K+1) * D - M,
// with D = bregman_gap(a -> b) and M = monotone_gap(a, b).  Both slacks are
// nonnegative exactly when the characterization inequality holds at (a, b).
struct CharacterizationResidual {
  double lower_slack;
  double upper_slack;
};
CharacterizationResidual characterization_residual(const FunctionSpec& f, const SubgradientPair& a,
                                                   const SubgradientPair& b, double K);

// D(x; y, grad f(y)) / D(y; x, grad f(x)) in [0, +inf].  Returns +inf when the
// denominator vanishes with a positive numerator (flat segment toward y) and 1
// when both gaps vanish.  Throws KinkError at kinks and rejects x == y.
double symmetry_ratio(const FunctionSpec& f, std::span<const double> x, std::span<const double> y);

// Smallest K for which the characterization holds at the smooth pair (x, y):
// max(ratio, 1/ratio).  Always >= 1.
double pair_min_constant(const FunctionSpec& f, std::span<const double> x,
                         std::span<const double> y);

}  // namespace engulf
