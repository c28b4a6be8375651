#pragma once

#include <string>
#include <vector>

#include "eigenflow/vec.hpp"

namespace eigenflow {

/// Bounded convex open domain. Three shapes are supported: balls, ellipsoids,
/// and intersections of balls. Membership is evaluated from the defining
/// inequalities, never from a grid, and the distance from an exterior point to
/// the closure is available for boundary-layer classification.
class Domain {
 public:
  enum class Kind { Ball, Ellipsoid, BallIntersection };

  static Domain ball(Vec center, double radius);
  /// Axis-aligned ellipsoid with semi-axes a_i > 0.
  static Domain ellipsoid(Vec center, Vec semi_axes);
  /// Intersection of balls; must be nonempty with nonempty interior.
  static Domain ball_intersection(std::vector<Vec> centers, std::vector<double> radii);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const char* kind_name() const;

  /// Strict membership in the open set.
  bool inside(const Vec& x) const;

  /// Membership with a small relative safety margin: true when x nudged
  /// outward along the anchor ray by ~margin is still inside. Lattice
  /// coordinates land on the boundary only up to rounding, so grid
  /// classification and boundary-datum guards use this instead of inside()
  /// to keep a node's role stable under coordinate noise.
  bool inside_by_margin(const Vec& x, double margin = 1e-9) const;

  /// Distance from x to the closure; zero for points inside. Exact for balls,
  /// solved to near machine precision for ellipsoids (monotone parameter
  /// bisection) and ball intersections (Dykstra projection).
  double exterior_distance(const Vec& x) const;

  /// Nearest point of the closure; x itself when inside.
  Vec project(const Vec& x) const;

  /// A point well inside the domain (the center, or a Chebyshev-style point
  /// for intersections), used to anchor grids and boundary ray sampling.
  Vec anchor() const { return anchor_; }

  /// Tight axis-aligned bounding box of the closure.
  BBox bounding_box() const;

  /// Radius of the smallest ball around `anchor()` containing the closure.
  /// Exact for balls and ellipsoids, a close upper bound for intersections.
  double enclosing_radius() const;

  /// Radius of the largest ball around `anchor()` contained in the closure.
  double inscribed_radius() const;

  /// Distance from an interior ray origin to the boundary along direction d
  /// (|d| = 1), found by bisection on the membership predicate. Origin must be
  /// inside.
  double ray_to_boundary(const Vec& origin, const Vec& direction) const;

 private:
  Domain() = default;
  Kind kind_ = Kind::Ball;
  int dim_ = 0;
  Vec anchor_;
  // Ball / ellipsoid: centers_[0] with radii_[0] or semi_axes_.
  std::vector<Vec> centers_;
  std::vector<double> radii_;
  Vec semi_axes_;
};

}  // namespace eigenflow
