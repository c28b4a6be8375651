#include "eigenflow/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eigenflow {

namespace {

Vec project_ball(const Vec& x, const Vec& c, double r) {
  Vec d = x - c;
  const double len = norm(d);
  if (len <= r) return x;
  return c + (r / len) * d;
}

// Nearest point on the ellipsoid boundary for an exterior query, via the
// standard Lagrange-parameter equation sum((a_i^2 y_i / (t + a_i^2))^2) = 1
// with y in centered coordinates; f is strictly decreasing in t >= 0, so
// bisection is safe.
Vec project_ellipsoid_exterior(const Vec& y, const Vec& a) {
  const int n = y.dim();
  auto f = [&](double t) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ai2 = a[i] * a[i];
      const double term = ai2 * y[i] / (t + ai2);
      s += term * term / ai2;
    }
    return s;  // sum (a_i y_i / (t + a_i^2))^2 ... written to avoid overflow
  };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 1.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  Vec p(n);
  for (int i = 0; i < n; ++i) {
    const double ai2 = a[i] * a[i];
    p[i] = ai2 * y[i] / (t + ai2);
  }
  return p;
}

}  // namespace

Domain Domain::ball(Vec center, double radius) {
  if (center.dim() < 1) throw std::invalid_argument("Domain::ball: center has dimension 0");
  if (!(radius > 0.0)) throw std::invalid_argument("Domain::ball: radius must be positive");
  Domain d;
  d.kind_ = Kind::Ball;
  d.dim_ = center.dim();
  d.centers_ = {center};
  d.radii_ = {radius};
  d.anchor_ = center;
  return d;
}

Domain Domain::ellipsoid(Vec center, Vec semi_axes) {
  if (center.dim() != semi_axes.dim())
    throw std::invalid_argument("Domain::ellipsoid: center/semi-axes dimension mismatch");
  if (center.dim() < 1) throw std::invalid_argument("Domain::ellipsoid: dimension 0");
  for (int i = 0; i < semi_axes.dim(); ++i)
    if (!(semi_axes[i] > 0.0))
      throw std::invalid_argument("Domain::ellipsoid: semi-axes must be positive");
  Domain d;
  d.kind_ = Kind::Ellipsoid;
  d.dim_ = center.dim();
  d.centers_ = {center};
  d.semi_axes_ = semi_axes;
  d.anchor_ = center;
  return d;
}

Domain Domain::ball_intersection(std::vector<Vec> centers, std::vector<double> radii) {
  if (centers.empty() || centers.size() != radii.size())
    throw std::invalid_argument("Domain::ball_intersection: need matching nonempty center/radius lists");
  const int n = centers[0].dim();
  for (const Vec& c : centers)
    if (c.dim() != n) throw std::invalid_argument("Domain::ball_intersection: mixed dimensions");
  for (double r : radii)
    if (!(r > 0.0)) throw std::invalid_argument("Domain::ball_intersection: radii must be positive");

  Domain d;
  d.kind_ = Kind::BallIntersection;
  d.dim_ = n;
  d.centers_ = std::move(centers);
  d.radii_ = std::move(radii);

  // Anchor: point maximizing min_i (r_i - |x - c_i|) by coordinate descent
  // from the centroid; cheap and deterministic. Interior must be nonempty.
  Vec x(n);
  for (const Vec& c : d.centers_) x += (1.0 / static_cast<double>(d.centers_.size())) * c;
  auto depth = [&](const Vec& p) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.centers_.size(); ++i)
      m = std::min(m, d.radii_[i] - norm(p - d.centers_[i]));
    return m;
  };
  double step = 0.0;
  for (double r : d.radii_) step = std::max(step, r);
  for (int round = 0; round < 60; ++round) {
    bool improved = false;
    for (int axis = 0; axis < n; ++axis) {
      for (double sgn : {+1.0, -1.0}) {
        Vec cand = x;
        cand[axis] += sgn * step;
        if (depth(cand) > depth(x)) {
          x = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (step < 1e-12) break;
  }
  if (!(depth(x) > 0.0))
    throw std::invalid_argument("Domain::ball_intersection: empty interior");
  d.anchor_ = x;
  return d;
}

const char* Domain::kind_name() const {
  switch (kind_) {
    case Kind::Ball: return "ball";
    case Kind::Ellipsoid: return "ellipsoid";
    case Kind::BallIntersection: return "ball-intersection";
  }
  return "?";
}

bool Domain::inside(const Vec& x) const {
  switch (kind_) {
    case Kind::Ball:
      return norm2(x - centers_[0]) < radii_[0] * radii_[0];
    case Kind::Ellipsoid: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double t = (x[i] - centers_[0][i]) / semi_axes_[i];
        s += t * t;
      }
      return s < 1.0;
    }
    case Kind::BallIntersection:
      for (std::size_t i = 0; i < centers_.size(); ++i)
        if (norm2(x - centers_[i]) >= radii_[i] * radii_[i]) return false;
      return true;
  }
  return false;
}

bool Domain::inside_by_margin(const Vec& x, double margin) const {
  if (!inside(x)) return false;
  const Vec d = x - anchor_;
  const double len = norm(d);
  if (len == 0.0) return true;
  // Convexity makes the outward anchor ray cross the boundary exactly once.
  return inside(x + (margin * std::max(1.0, len) / len) * d);
}

Vec Domain::project(const Vec& x) const {
  if (inside(x)) return x;
  switch (kind_) {
    case Kind::Ball:
      return project_ball(x, centers_[0], radii_[0]);
    case Kind::Ellipsoid: {
      Vec y = x - centers_[0];
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double t = y[i] / semi_axes_[i];
        s += t * t;
      }
      if (s <= 1.0) return x;
      return centers_[0] + project_ellipsoid_exterior(y, semi_axes_);
    }
    case Kind::BallIntersection: {
      if (centers_.size() == 1) return project_ball(x, centers_[0], radii_[0]);
      // Dykstra's alternating projections onto the balls; converges to the
      // nearest point of the intersection for convex sets.
      const std::size_t m = centers_.size();
      std::vector<Vec> corrections(m, Vec::zero(dim_));
      Vec p = x;
      for (int sweep = 0; sweep < 4000; ++sweep) {
        double moved = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const Vec target = p + corrections[i];
          const Vec proj = project_ball(target, centers_[i], radii_[i]);
          corrections[i] = target - proj;
          moved = std::max(moved, norm(p - proj));
          p = proj;
        }
        if (moved < 1e-14) break;
      }
      return p;
    }
  }
  return x;
}

double Domain::exterior_distance(const Vec& x) const {
  if (inside(x)) return 0.0;
  if (kind_ == Kind::Ball) {
    return std::max(0.0, norm(x - centers_[0]) - radii_[0]);
  }
  return norm(x - project(x));
}

BBox Domain::bounding_box() const {
  Vec lo(dim_), hi(dim_);
  switch (kind_) {
    case Kind::Ball:
      for (int i = 0; i < dim_; ++i) {
        lo[i] = centers_[0][i] - radii_[0];
        hi[i] = centers_[0][i] + radii_[0];
      }
      break;
    case Kind::Ellipsoid:
      for (int i = 0; i < dim_; ++i) {
        lo[i] = centers_[0][i] - semi_axes_[i];
        hi[i] = centers_[0][i] + semi_axes_[i];
      }
      break;
    case Kind::BallIntersection:
      for (int i = 0; i < dim_; ++i) {
        lo[i] = -std::numeric_limits<double>::infinity();
        hi[i] = std::numeric_limits<double>::infinity();
      }
      for (std::size_t b = 0; b < centers_.size(); ++b)
        for (int i = 0; i < dim_; ++i) {
          lo[i] = std::max(lo[i], centers_[b][i] - radii_[b]);
          hi[i] = std::min(hi[i], centers_[b][i] + radii_[b]);
        }
      break;
  }
  return {lo, hi};
}

double Domain::enclosing_radius() const {
  switch (kind_) {
    case Kind::Ball:
      return norm(anchor_ - centers_[0]) + radii_[0];
    case Kind::Ellipsoid: {
      // Anchor is the center, so the smallest covering ball has the radius of
      // the longest semi-axis.
      double r = 0.0;
      for (int i = 0; i < dim_; ++i) r = std::max(r, semi_axes_[i]);
      return r;
    }
    case Kind::BallIntersection: {
      // The intersection sits inside each ball, so |anchor - c| + r bounds it;
      // the bounding-box corner distance is a second bound. Take the smaller.
      double r = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < centers_.size(); ++b)
        r = std::min(r, norm(anchor_ - centers_[b]) + radii_[b]);
      const BBox box = bounding_box();
      double corner2 = 0.0;
      for (int corner = 0; corner < (1 << dim_); ++corner) {
        Vec p(dim_);
        for (int i = 0; i < dim_; ++i) p[i] = (corner >> i & 1) ? box.hi[i] : box.lo[i];
        corner2 = std::max(corner2, norm2(p - anchor_));
      }
      return std::min(r, std::sqrt(corner2));
    }
  }
  return 0.0;
}

double Domain::inscribed_radius() const {
  switch (kind_) {
    case Kind::Ball:
      return radii_[0] - norm(anchor_ - centers_[0]);
    case Kind::Ellipsoid: {
      double r = std::numeric_limits<double>::infinity();
      for (int i = 0; i < dim_; ++i) r = std::min(r, semi_axes_[i]);
      return r;
    }
    case Kind::BallIntersection: {
      // B(anchor, rho) lies in B(c, r) exactly when rho <= r - |anchor - c|,
      // so the largest ball inside the intersection takes the minimum.
      double r = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < centers_.size(); ++b)
        r = std::min(r, radii_[b] - norm(anchor_ - centers_[b]));
      return r;
    }
  }
  return 0.0;
}

double Domain::ray_to_boundary(const Vec& origin, const Vec& direction) const {
  if (!inside(origin))
    throw std::invalid_argument("Domain::ray_to_boundary: origin must be interior");
  double lo = 0.0;
  double hi = enclosing_radius() * 2.0 + 1.0;
  if (inside(origin + hi * direction))
    throw std::logic_error("Domain::ray_to_boundary: ray never leaves the domain");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(origin + mid * direction) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace eigenflow
