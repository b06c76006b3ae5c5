#include "engulf/sections.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "engulf/bregman.hpp"

namespace engulf {

namespace {

constexpr double kBoundaryBand = 1e-3;  // near-boundary samples: gap >= (1 - band) t
constexpr int kBisectIters = 60;
constexpr double kBisectTol = 1e-12;

void check_height(double t) {
  if (!(t > 0)) throw std::invalid_argument("section: height t must be > 0");
}

Vec point_on_ray(const SubgradientPair& base, std::span<const double> dir, double r) {
  Vec p(base.point.size());
  for (size_t i = 0; i < p.size(); ++i) p[i] = base.point[i] + r * dir[i];
  return p;
}

}  // namespace

bool contains(const FunctionSpec& f, const SubgradientPair& base, double t,
              std::span<const double> y) {
  check_height(t);
  return bregman_gap(f, base, y) < t;
}

RayHit boundary_radius(const FunctionSpec& f, const SubgradientPair& base, double t,
                       std::span<const double> direction, double r_cap) {
  check_height(t);
  const auto gap_at = [&](double r) { return bregman_gap(f, base, point_on_ray(base, direction, r)); };

  // Bracket by doubling from 1; past r_cap the ray is cap-classified unbounded.
  double lo = 0.0;
  double hi = 1.0;
  while (true) {
    const double g = gap_at(hi);
    if (g >= t || !std::isfinite(g)) break;
    lo = hi;
    hi *= 2.0;
    if (hi > r_cap)
      return {std::numeric_limits<double>::infinity(), true, lo};
  }

  for (int i = 0; i < kBisectIters && hi - lo > kBisectTol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap_at(mid);
    if (g < t && std::isfinite(g)) lo = mid;
    else hi = mid;
  }

  // Push the inner point into the near-boundary band; the gap is continuous,
  // so the lower bisection bound converges to gap == t from below.
  double inner = lo;
  double outer = hi;
  for (int i = 0; i < 200 && (inner == 0.0 || gap_at(inner) < (1.0 - kBoundaryBand) * t); ++i) {
    const double mid = 0.5 * (inner + outer);
    const double g = gap_at(mid);
    if (g < t && std::isfinite(g)) inner = mid;
    else outer = mid;
  }
  return {0.5 * (lo + hi), false, inner};
}

Interval1D solve_interval_1d(const FunctionSpec& f, double x0, double p, double t, double r_cap) {
  if (f.dimension() != 1) throw std::invalid_argument("solve_interval_1d: requires dimension 1");
  check_height(t);
  const SubgradientPair base{{x0}, {p}};
  const double plus = 1.0, minus = -1.0;
  const RayHit right = boundary_radius(f, base, t, std::span<const double>(&plus, 1), r_cap);
  const RayHit left = boundary_radius(f, base, t, std::span<const double>(&minus, 1), r_cap);
  Interval1D iv;
  iv.hi_capped = right.capped;
  iv.lo_capped = left.capped;
  iv.hi = right.capped ? std::numeric_limits<double>::infinity() : x0 + right.radius;
  iv.lo = left.capped ? -std::numeric_limits<double>::infinity() : x0 - left.radius;
  return iv;
}

SectionSample sample_section(const FunctionSpec& f, const SubgradientPair& base, double t,
                             const SamplerConfig& cfg, Rng& rng) {
  check_height(t);
  const int n = f.dimension();

  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
  } else {
    for (int i = 0; i < cfg.directions; ++i) dirs.push_back(sample_unit_direction(rng, n));
  }

  SectionSample out;
  const int per_dir = std::max(1, cfg.section_samples / static_cast<int>(dirs.size()));
  for (const auto& dir : dirs) {
    const RayHit hit = boundary_radius(f, base, t, dir, cfg.r_cap);
    if (!hit.capped) {
      if (hit.inner_radius > 0) out.points.push_back(point_on_ray(base, dir, hit.inner_radius));
      for (int k = 0; k < per_dir; ++k) {
        const double u = rng.log_uniform(1e-8, 1.0);
        const double r = u * hit.inner_radius;
        if (r > 0) out.points.push_back(point_on_ray(base, dir, r));
      }
    } else {
      out.any_capped = true;
      for (int k = 0; k < per_dir + 1; ++k) {
        const double r = rng.log_uniform(1.0, cfg.r_cap);
        Vec y = point_on_ray(base, dir, r);
        if (std::isfinite(f.impl().eval(y)) && bregman_gap(f, base, y) < t)
          out.points.push_back(std::move(y));
      }
    }
  }
  return out;
}

Section materialize_section(const FunctionSpec& f, const SubgradientPair& base, double t,
                            int directions, double r_cap) {
  check_height(t);
  Section s{base, t, Interval1D{}};
  if (f.dimension() == 1) {
    s.geometry = solve_interval_1d(f, base.point[0], base.slope[0], t, r_cap);
    return s;
  }
  if (directions < 3) throw std::invalid_argument("materialize_section: need >= 3 directions");
  RadialBoundary rb;
  const int n = f.dimension();
  if (n == 2) {
    for (int j = 0; j < directions; ++j) {
      const double theta = 2.0 * 3.14159265358979323846 * j / directions;
      rb.directions.push_back({std::cos(theta), std::sin(theta)});
    }
  } else {
    Rng rng(0x5ec71045u);  // fixed fan for determinism
    for (int j = 0; j < directions; ++j) rb.directions.push_back(sample_unit_direction(rng, n));
  }
  for (const auto& d : rb.directions) {
    const RayHit hit = boundary_radius(f, base, t, d, r_cap);
    rb.radii.push_back(hit.radius);
    rb.capped.push_back(hit.capped);
  }
  s.geometry = std::move(rb);
  return s;
}

}  // namespace engulf
