#include <doctest.h>

#include <cmath>

#include "engulf/bregman.hpp"
#include "engulf/sections.hpp"

using namespace engulf;

TEST_CASE("membership is the strict gap inequality") {
  const FunctionSpec quad = catalog_function("quad");
  const SubgradientPair base{{0.0}, {0.0}};
  CHECK(contains(quad, base, 4.0, Vec{1.0}));
  CHECK_FALSE(contains(quad, base, 4.0, Vec{2.0}));  // boundary excluded
  CHECK(contains(quad, base, 4.0, Vec{0.0}));        // base point

  const FunctionSpec aff = catalog_function("affine");
  CHECK(contains(aff, {{0.0}, {2.0}}, 0.5, Vec{1e6}));  // sections are the whole line

  CHECK_THROWS_AS(contains(quad, base, 0.0, Vec{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(contains(quad, base, -1.0, Vec{0.0}), std::invalid_argument);
}

TEST_CASE("1D interval solve") {
  const FunctionSpec quad = catalog_function("quad");
  const Interval1D iv = solve_interval_1d(quad, 0.0, 0.0, 4.0);
  CHECK_FALSE(iv.lo_capped);
  CHECK_FALSE(iv.hi_capped);
  CHECK(iv.lo == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(iv.hi == doctest::Approx(2.0).epsilon(1e-10));

  const FunctionSpec ex21 = catalog_function("ex21");
  const Interval1D iv2 = solve_interval_1d(ex21, 0.0, 0.0, 1.0);
  CHECK(iv2.lo == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(iv2.hi == doctest::Approx(1.0).epsilon(1e-10));

  const Interval1D iv3 = solve_interval_1d(catalog_function("affine"), 5.0, 2.0, 0.25);
  CHECK(iv3.lo_capped);
  CHECK(iv3.hi_capped);
  CHECK(std::isinf(iv3.lo));
  CHECK(std::isinf(iv3.hi));

  CHECK_THROWS_AS(solve_interval_1d(quad, 0.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("endpoint consistency across bases and heights") {
  for (const char* tag : {"quad", "quartic", "ex21", "exp", "expsq"}) {
    const FunctionSpec f = catalog_function(tag);
    for (double x0 : {-1.5, 0.0, 2.0}) {
      const double p = gradient(f, Vec{x0})[0];
      for (double t : {1e-4, 0.5, 10.0, 1000.0}) {
        const Interval1D iv = solve_interval_1d(f, x0, p, t);
        const SubgradientPair base{{x0}, {p}};
        if (!iv.lo_capped) {
          CHECK(iv.lo < x0);
          CHECK(std::abs(bregman_gap(f, base, Vec{iv.lo}) - t) <= 1e-9 * (1.0 + t));
        }
        if (!iv.hi_capped) {
          CHECK(iv.hi > x0);
          CHECK(std::abs(bregman_gap(f, base, Vec{iv.hi}) - t) <= 1e-9 * (1.0 + t));
        }
      }
    }
  }
}

TEST_CASE("boundary radius of the cylinder") {
  const FunctionSpec strip = catalog_function("strip2d");
  const SubgradientPair base{{0.0, 0.0}, {0.0, 0.0}};

  const RayHit rx = boundary_radius(strip, base, 1.0, Vec{1.0, 0.0});
  CHECK_FALSE(rx.capped);
  CHECK(rx.radius == doctest::Approx(1.0).epsilon(1e-10));

  const RayHit ry = boundary_radius(strip, base, 1.0, Vec{0.0, 1.0});
  CHECK(ry.capped);
  CHECK(std::isinf(ry.radius));

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const RayHit rd = boundary_radius(strip, base, 1.0, Vec{inv_sqrt2, inv_sqrt2});
  CHECK(rd.radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("radial solve agrees with the 1D interval") {
  for (const char* tag : {"quad", "quartic", "ex21", "exp"}) {
    const FunctionSpec f = catalog_function(tag);
    const double x0 = 0.5;
    const double p = gradient(f, Vec{x0})[0];
    const SubgradientPair base{{x0}, {p}};
    for (double t : {0.1, 2.0, 50.0}) {
      const Interval1D iv = solve_interval_1d(f, x0, p, t);
      const RayHit right = boundary_radius(f, base, t, Vec{1.0});
      const RayHit left = boundary_radius(f, base, t, Vec{-1.0});
      CHECK(x0 + right.radius == doctest::Approx(iv.hi).epsilon(1e-9));
      CHECK(x0 - left.radius == doctest::Approx(iv.lo).epsilon(1e-9));
    }
  }
}

TEST_CASE("section sampling: membership, near-boundary points, nesting") {
  const FunctionSpec quad = catalog_function("quad");
  const SubgradientPair base{{0.0}, {0.0}};
  SamplerConfig cfg;
  cfg.section_samples = 10;
  Rng rng(5);
  const SectionSample s = sample_section(quad, base, 4.0, cfg, rng);
  CHECK_FALSE(s.any_capped);
  CHECK(s.points.size() >= 6);
  bool near_lo = false, near_hi = false;
  for (const auto& y : s.points) {
    CHECK(contains(quad, base, 4.0, y));
    CHECK(std::abs(y[0]) < 2.0);
    const double gap = bregman_gap(quad, base, y);
    if (gap >= (1.0 - 1e-3) * 4.0) (y[0] > 0 ? near_hi : near_lo) = true;
    // nesting: members of S(t) belong to S(t') for t' > t
    CHECK(contains(quad, base, 8.0, y));
  }
  CHECK(near_lo);
  CHECK(near_hi);
}

TEST_CASE("section sampling spans unbounded rays") {
  const FunctionSpec aff = catalog_function("affine");
  const SubgradientPair base{{0.0}, {2.0}};
  SamplerConfig cfg;
  Rng rng(6);
  const SectionSample s = sample_section(aff, base, 1.0, cfg, rng);
  CHECK(s.any_capped);
  CHECK(!s.points.empty());
  double widest = 0;
  for (const auto& y : s.points) {
    CHECK(contains(aff, base, 1.0, y));
    widest = std::max(widest, std::abs(y[0]));
  }
  CHECK(widest > 1e3);  // samples reach far into the cap range
}

TEST_CASE("strip2d samples stay in the strip") {
  // random rays are almost never exactly vertical, so radii are finite but
  // huge along near-flat directions; membership still pins |x| < 1
  const FunctionSpec strip = catalog_function("strip2d");
  const SubgradientPair base{{0.0, 0.0}, {0.0, 0.0}};
  SamplerConfig cfg;
  Rng rng(7);
  const SectionSample s = sample_section(strip, base, 1.0, cfg, rng);
  double tallest = 0.0;
  for (const auto& y : s.points) {
    CHECK(std::abs(y[0]) < 1.0);
    tallest = std::max(tallest, std::abs(y[1]));
  }
  CHECK(tallest > 1.0);  // the unconstrained coordinate roams past the strip width
}

TEST_CASE("sampled members have convex midpoints") {
  for (const char* tag : {"quad", "ex21", "strip2d"}) {
    const FunctionSpec f = catalog_function(tag);
    Vec x0(static_cast<size_t>(f.dimension()), 0.25);
    const SubgradientPair base{x0, gradient(f, x0)};
    SamplerConfig cfg;
    Rng rng(8);
    const SectionSample s = sample_section(f, base, 2.0, cfg, rng);
    for (size_t i = 0; i + 1 < s.points.size(); i += 2) {
      Vec mid(s.points[i].size());
      for (size_t c = 0; c < mid.size(); ++c)
        mid[c] = 0.5 * (s.points[i][c] + s.points[i + 1][c]);
      CHECK(contains(f, base, 2.0, mid));
    }
  }
}

TEST_CASE("materialized geometry") {
  const Section s1 = materialize_section(catalog_function("quad"), {{0.0}, {0.0}}, 4.0, 2);
  REQUIRE(std::holds_alternative<Interval1D>(s1.geometry));

  const Section s2 = materialize_section(catalog_function("strip2d"), {{0.0, 0.0}, {0.0, 0.0}},
                                          1.0, 8);
  const auto& rb = std::get<RadialBoundary>(s2.geometry);
  REQUIRE(rb.radii.size() == 8);
  CHECK(rb.radii[0] == doctest::Approx(1.0));  // direction (1, 0)
  CHECK(rb.capped[2]);                         // direction (0, 1)

  // n = 3: unit-ball section of the identity quadratic form
  const FunctionSpec ball = polyquad_function({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const Section s3 = materialize_section(ball, {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, 1.0, 16);
  for (const double r : std::get<RadialBoundary>(s3.geometry).radii)
    CHECK(r == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampler config validation") {
  SamplerConfig bad;
  bad.t_min = 1.0;
  bad.t_max = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SamplerConfig{};
  bad.triples = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SamplerConfig{};
  bad.box_radius = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(SamplerConfig{}.validate());
}
