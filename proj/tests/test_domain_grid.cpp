#include <cmath>
#include <limits>

#include "doctest.h"
#include "eigenflow/domain.hpp"
#include "eigenflow/grid.hpp"
#include "eigenflow/rng.hpp"

using namespace eigenflow;

TEST_CASE("ball membership, distance, projection") {
  const Domain d = Domain::ball(Vec{0.5, -0.25}, 2.0);
  CHECK(d.inside(Vec{0.5, -0.25}));
  CHECK(d.inside(Vec{2.0, 0.5}));
  CHECK_FALSE(d.inside(Vec{3.0, 0.0}));
  CHECK(d.exterior_distance(Vec{0.5, -0.25}) == 0.0);
  // distance from an exterior point is |x - c| - R exactly
  const Vec x{4.5, -0.25};
  CHECK(d.exterior_distance(x) == doctest::Approx(2.0).epsilon(1e-14));
  const Vec p = d.project(x);
  CHECK(p[0] == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(p[1] == doctest::Approx(-0.25).epsilon(1e-13));
}

TEST_CASE("ball radii around the anchor are tight") {
  const Domain d = Domain::ball(Vec{0.0, 0.0}, 1.0);
  CHECK(d.enclosing_radius() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.inscribed_radius() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("ellipsoid radii are the extreme semi-axes") {
  const Domain d = Domain::ellipsoid(Vec{0.0, 0.0, 0.0}, Vec{2.0, 1.0, 0.5});
  CHECK(d.enclosing_radius() == doctest::Approx(2.0));
  CHECK(d.inscribed_radius() == doctest::Approx(0.5));
  CHECK(d.inside(Vec{1.9, 0.0, 0.0}));
  CHECK_FALSE(d.inside(Vec{0.0, 0.0, 0.6}));
}

TEST_CASE("ellipsoid projection lands on the surface at the nearest point") {
  const Domain d = Domain::ellipsoid(Vec{0.0, 0.0}, Vec{2.0, 1.0});
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    Vec x = 3.0 * rng.unit_vector(2);
    if (d.inside(x)) continue;
    const Vec p = d.project(x);
    const double on_surface = p[0] * p[0] / 4.0 + p[1] * p[1] - 1.0;
    CHECK(std::abs(on_surface) < 1e-9);
    // x - p must be parallel to the outward normal (p0/4, p1) at p
    const Vec n{p[0] / 4.0, p[1]};
    const Vec diff = x - p;
    const double cross = diff[0] * n[1] - diff[1] * n[0];
    CHECK(std::abs(cross) < 1e-6 * std::max(1.0, norm(diff)));
    CHECK(d.exterior_distance(x) == doctest::Approx(norm(diff)).epsilon(1e-9));
  }
}

TEST_CASE("lens of two balls") {
  const Domain d =
      Domain::ball_intersection({Vec{-0.5, 0.0}, Vec{0.5, 0.0}}, {1.0, 1.0});
  CHECK(d.inside(d.anchor()));
  CHECK(d.inside(Vec{0.0, 0.8}));
  CHECK_FALSE(d.inside(Vec{0.49, 0.5}));  // outside the left ball
  CHECK(d.inscribed_radius() == doctest::Approx(0.5).epsilon(1e-12));
  // widest extent of the lens is sqrt(3)/2 up the vertical axis; intersections
  // report a bounding-box upper bound, never more than either ball alone gives
  CHECK(d.enclosing_radius() >= std::sqrt(3.0) / 2.0 - 1e-12);
  CHECK(d.enclosing_radius() <= 1.5 + 1e-12);
  // distance to the lens is at least the distance to either ball
  const Vec x{2.0, 0.0};
  CHECK(d.exterior_distance(x) >= 0.5 - 1e-9);
}

TEST_CASE("margin membership rejects boundary-grazing rounding artifacts") {
  const Domain d = Domain::ball(Vec{0.0, 0.0}, 1.0);
  // one ulp inside the open ball, as a lattice coordinate can land after
  // accumulated rounding
  const double grazing = std::nextafter(1.0, 0.0);
  REQUIRE(grazing < 1.0);
  CHECK(d.inside(Vec{grazing, 0.0}));
  CHECK_FALSE(d.inside_by_margin(Vec{grazing, 0.0}));
  CHECK(d.inside_by_margin(Vec{0.99, 0.0}));
  CHECK(d.inside_by_margin(d.anchor()));
}

TEST_CASE("ray_to_boundary on the disk") {
  const Domain d = Domain::ball(Vec{0.0, 0.0}, 1.0);
  CHECK(d.ray_to_boundary(Vec{0.0, 0.0}, Vec{1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d.ray_to_boundary(Vec{0.5, 0.0}, Vec{1.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-10));
  const double diag = d.ray_to_boundary(Vec{0.0, 0.0}, Vec{std::sqrt(0.5), std::sqrt(0.5)});
  CHECK(diag == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("grid classifies nodes consistently with the domain") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const double h = 0.05, eps = 0.1;
  const Grid grid = build_grid(dom, h, eps);

  CHECK(grid.spacing() == h);
  CHECK(grid.epsilon() == eps);
  REQUIRE(grid.interior_nodes().size() > 0);
  REQUIRE(grid.strip_nodes().size() > 0);

  for (std::size_t id : grid.interior_nodes()) {
    CHECK(grid.classify(id) == NodeClass::Interior);
    CHECK(dom.inside_by_margin(grid.point(id)));
    CHECK(grid.carries_value(id));
  }
  for (std::size_t id : grid.strip_nodes()) {
    const Vec x = grid.point(id);
    CHECK_FALSE(dom.inside_by_margin(x));
    CHECK(dom.exterior_distance(x) <= eps * (1.0 + 1e-9));
    CHECK(grid.carries_value(id));
  }
  // the boundary layer is the strip plus the interpolation halo
  CHECK(grid.boundary_layer_nodes().size() >= grid.strip_nodes().size());
  for (std::size_t id : grid.boundary_layer_nodes()) {
    CHECK(grid.carries_value(id));
    CHECK(grid.classify(id) != NodeClass::Interior);
  }
}

TEST_CASE("the anchor is a lattice node") {
  const Domain dom = Domain::ball(Vec{0.3, -0.2}, 0.7);
  const Grid grid = build_grid(dom, 0.05, 0.1);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t id : grid.interior_nodes())
    best = std::min(best, norm(grid.point(id) - dom.anchor()));
  CHECK(best < 1e-12);
}

TEST_CASE("interpolation is exact on affine data and never overshoots") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const Grid grid = build_grid(dom, 0.1, 0.2);
  ValueSlice s;
  s.time = 0.0;
  s.epsilon = 0.2;
  s.values.assign(grid.node_count(), std::numeric_limits<double>::quiet_NaN());
  const Vec gvec{0.7, -1.3};
  for (std::size_t id = 0; id < grid.node_count(); ++id)
    if (grid.carries_value(id)) s.values[id] = dot(gvec, grid.point(id)) + 0.25;

  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    Vec x{1.8 * (rng.uniform01() - 0.5), 1.8 * (rng.uniform01() - 0.5)};
    if (!dom.inside(x)) continue;
    const double got = interpolate(s, grid, x);
    CHECK(got == doctest::Approx(dot(gvec, x) + 0.25).epsilon(1e-12));
  }
}

TEST_CASE("cell weights form a convex combination") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const Grid grid = build_grid(dom, 0.1, 0.2);
  std::size_t corners[4];
  double weights[4];
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const Vec x{0.9 * (2.0 * rng.uniform01() - 1.0), 0.9 * (2.0 * rng.uniform01() - 1.0)};
    grid.cell(x, corners, weights);
    double sum = 0.0;
    for (int c = 0; c < 4; ++c) {
      CHECK(weights[c] >= -1e-12);
      sum += weights[c];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("build_grid validates spacing") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  CHECK_THROWS(build_grid(dom, 0.2, 0.1));   // h > epsilon
  CHECK_THROWS(build_grid(dom, 0.0, 0.1));
  CHECK_NOTHROW(build_grid(dom, 0.1, 0.1));
}

TEST_CASE("shift walks the lattice and stops at the edge") {
  const Domain dom = Domain::ball(Vec{0.0}, 1.0);
  const Grid grid = build_grid(dom, 0.25, 0.25);
  const std::size_t start = grid.interior_nodes()[0];
  std::size_t out = 0;
  REQUIRE(grid.shift(start, {1}, out));
  const Vec a = grid.point(start);
  const Vec b = grid.point(out);
  CHECK(b[0] - a[0] == doctest::Approx(0.25).epsilon(1e-13));
  // marching far off the lattice must fail rather than wrap
  CHECK_FALSE(grid.shift(start, {1000000}, out));
}
