#pragma once

#include <span>
#include <variant>
#include <vector>

#include "engulf/function.hpp"

namespace engulf {

// Open section S(x0, p, t) = { y : f(y) - f(x0) - p.(y - x0) < t }.

bool contains(const FunctionSpec& f, const SubgradientPair& base, double t,
              std::span<const double> y);

struct Interval1D {
  double lo;        // -inf when lo_capped
  double hi;        // +inf when hi_capped
  bool lo_capped;   // boundary not found within r_cap: cap-classified unbounded
  bool hi_capped;
};

// Endpoints a < x0 < b of the 1D section; finite endpoints satisfy
// gap(endpoint) = t within 1e-9 * (1 + t).
Interval1D solve_interval_1d(const FunctionSpec& f, double x0, double p, double t,
                             double r_cap = 1e12);

struct RayHit {
  double radius;        // +inf when capped
  bool capped;
  double inner_radius;  // strictly inside, gap in [(1 - 1e-3) t, t) for finite rays
};

// Distance from x0 to the section boundary along a ray.  The gap is
// nondecreasing in the radius (convexity), so doubling brackets the boundary
// and bisection refines it: absolute 1e-12 on r or 60 iterations.
RayHit boundary_radius(const FunctionSpec& f, const SubgradientPair& base, double t,
                       std::span<const double> direction, double r_cap = 1e12);

struct SectionSample {
  std::vector<Vec> points;  // all strictly inside the section
  bool any_capped = false;  // some sampled ray was cap-classified unbounded
};

// Interior and near-boundary points of the section; near-boundary points have
// gap >= (1 - 1e-3) t along every sampled direction with a finite radius.
SectionSample sample_section(const FunctionSpec& f, const SubgradientPair& base, double t,
                             const SamplerConfig& cfg, Rng& rng);

struct RadialBoundary {
  std::vector<Vec> directions;  // unit vectors
  std::vector<double> radii;    // +inf where capped
  std::vector<bool> capped;
};

struct Section {
  SubgradientPair base;
  double height;
  std::variant<Interval1D, RadialBoundary> geometry;
};

// Geometry for reports: the exact interval in dimension 1, a deterministic
// fan of `directions` radial boundary samples otherwise.
Section materialize_section(const FunctionSpec& f, const SubgradientPair& base, double t,
                            int directions, double r_cap = 1e12);

}  // namespace engulf
