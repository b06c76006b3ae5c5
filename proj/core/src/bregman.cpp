#include "engulf/bregman.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace engulf {

namespace {

void check_pair(const FunctionSpec& f, const SubgradientPair& a, const char* what) {
  const auto n = static_cast<size_t>(f.dimension());
  if (a.point.size() != n || a.slope.size() != n)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

double bregman_gap(const FunctionSpec& f, const SubgradientPair& base, std::span<const double> y) {
  check_pair(f, base, "bregman_gap");
  if (y.size() != base.point.size()) throw std::invalid_argument("bregman_gap: dimension mismatch");
  double lin = 0;
  for (size_t i = 0; i < y.size(); ++i) lin += base.slope[i] * (y[i] - base.point[i]);
  return f.impl().eval(y) - f.impl().eval(base.point) - lin;
}

double monotone_gap(const FunctionSpec& f, const SubgradientPair& a, const SubgradientPair& b) {
  check_pair(f, a, "monotone_gap");
  check_pair(f, b, "monotone_gap");
  double s = 0;
  for (size_t i = 0; i < a.point.size(); ++i)
    s += (a.slope[i] - b.slope[i]) * (a.point[i] - b.point[i]);
  return s;
}

CharacterizationResidual characterization_residual(const FunctionSpec& f, const SubgradientPair& a,
                                                   const SubgradientPair& b, double K) {
  if (!(K > 1.0)) throw std::invalid_argument("characterization_residual: requires K > 1");
  const double d = bregman_gap(f, a, b.point);
  const double m = monotone_gap(f, a, b);
  return {m - (K + 1.0) / K * d, (K + 1.0) * d - m};
}

double symmetry_ratio(const FunctionSpec& f, std::span<const double> x, std::span<const double> y) {
  bool same = x.size() == y.size();
  for (size_t i = 0; same && i < x.size(); ++i) same = x[i] == y[i];
  if (same) throw std::invalid_argument("symmetry_ratio: x and y must differ");

  const Vec gx = gradient(f, x);  // KinkError at kinks
  const Vec gy = gradient(f, y);
  const double den = bregman_gap(f, {Vec(x.begin(), x.end()), gx}, y);
  const double num = bregman_gap(f, {Vec(y.begin(), y.end()), gy}, x);
  if (den <= 0.0) {
    if (num <= 0.0) return 1.0;  // flat in both directions
    return std::numeric_limits<double>::infinity();
  }
  return num / den;
}

double pair_min_constant(const FunctionSpec& f, std::span<const double> x,
                         std::span<const double> y) {
  const double r = symmetry_ratio(f, x, y);
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(r)) return r;
  return std::max(r, 1.0 / r);
}

}  // namespace engulf
