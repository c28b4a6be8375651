#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "eigenflow/domain.hpp"
#include "eigenflow/grid.hpp"

namespace eigenflow {

struct BoundarySample {
  Vec point;
  double value = 0.0;
};

/// Boundary samples by ray casting from the domain anchor: antipodally paired
/// directions, spacing along the boundary roughly `spacing` (N <= 3).
std::vector<BoundarySample> sample_boundary(const Domain& domain,
                                            const std::function<double(const Vec&)>& g,
                                            double spacing);

/// Lower convex hull value at x restricted to the samples: the minimum of
/// sum(lambda_i * value_i) over convex combinations of at most dim+1 sample
/// points equal to x, by exhaustive subset enumeration with a least-squares
/// barycentric solve per subset.
/// Throws if x is not in the convex hull of the sample points at `feas_tol`.
double convex_envelope_at(const std::vector<BoundarySample>& samples, const Vec& x,
                          double feas_tol = 1e-9);

struct EnvelopeStats {
  std::size_t relaxed_nodes = 0;   ///< nodes needing the widened feasibility tolerance
  double max_residual = 0.0;       ///< worst combination residual actually accepted
};

/// Convex envelope of the boundary samples evaluated at every interior grid
/// node. Nodes in the sliver between the sampled polygon and the true boundary
/// retry with a tolerance of order spacing^2; values elsewhere are NaN.
ValueSlice convex_envelope(const Domain& domain, const std::vector<BoundarySample>& samples,
                           const Grid& grid, EnvelopeStats* stats = nullptr);

/// Mirror image: concave_envelope(g) = -convex_envelope(-g), node for node.
ValueSlice concave_envelope(const Domain& domain, const std::vector<BoundarySample>& samples,
                            const Grid& grid, EnvelopeStats* stats = nullptr);

/// Upper bound for the stationary solution at p from the axis-aligned section
/// through p spanned by `section_axes`: the concave envelope of g restricted
/// to the section's relative boundary, evaluated at p. Rays from p are cast in
/// antipodal pairs inside the section plane.
/// Throws if p is not interior (empty section).
double directional_envelope_bound(const Domain& domain,
                                  const std::function<double(const Vec&)>& g,
                                  const std::vector<int>& section_axes, const Vec& p,
                                  int rays = 64);

}  // namespace eigenflow
