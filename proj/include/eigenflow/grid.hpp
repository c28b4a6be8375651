#pragma once

#include <cstdint>
#include <vector>

#include "eigenflow/domain.hpp"
#include "eigenflow/vec.hpp"

namespace eigenflow {

/// Classification of a lattice node relative to the domain: interior points of
/// the open set, the exterior boundary layer of width epsilon where boundary
/// data lives, and far exterior nodes that no computation may read.
enum class NodeClass : std::uint8_t { Interior, Strip, Far };

/// Uniform Cartesian lattice covering the domain plus its epsilon-layer.
///
/// Nodes sit at anchor + h * (k - half) per axis, so the domain's anchor point
/// is itself a node. Beyond the epsilon strip the grid keeps a thin halo of
/// extra value-carrying nodes (width max(epsilon, h*sqrt(N))) so that the
/// 2^N-corner interpolation stencil of any point within epsilon of the closure
/// is complete; halo nodes still classify as Far.
class Grid {
 public:
  Grid(Domain domain, double h, double epsilon);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  double spacing() const { return h_; }
  double epsilon() const { return epsilon_; }

  std::size_t node_count() const { return total_; }
  int extent(int axis) const { return extent_[axis]; }

  /// Multi-index of a node from its linear id and back.
  std::size_t index_of(const std::vector<int>& multi) const;
  Vec point(std::size_t id) const;
  double coordinate(int axis, int k) const { return origin_[axis] + h_ * k; }

  NodeClass classify(std::size_t id) const { return cls_[id]; }
  /// True for interior, strip, and halo nodes; only these carry slice values.
  bool carries_value(std::size_t id) const { return valued_[id] != 0; }

  const std::vector<std::size_t>& interior_nodes() const { return interior_; }
  const std::vector<std::size_t>& strip_nodes() const { return strip_; }
  /// All value-carrying nodes outside the open domain (strip plus halo).
  const std::vector<std::size_t>& boundary_layer_nodes() const { return layer_; }

  /// Linear id arithmetic: neighbor displaced by `steps` lattice cells along
  /// each axis. Returns false if it would leave the grid.
  bool shift(std::size_t id, const std::vector<int>& steps, std::size_t& out) const;

  /// True when x lies inside the box covered by the lattice (with fp slack).
  bool covers(const Vec& x) const;

  /// Cell locator for interpolation: fills the 2^N corner ids and weights.
  /// Weights are nonnegative and sum to one (convex combination), so
  /// interpolation cannot overshoot the surrounding node values.
  void cell(const Vec& x, std::size_t corners[/*2^N*/], double weights[/*2^N*/]) const;

 private:
  Domain domain_;
  double h_;
  double epsilon_;
  double halo_width_;
  Vec origin_;                       // coordinate of multi-index (0,...,0)
  std::vector<int> extent_;          // nodes per axis
  std::vector<std::size_t> stride_;  // linear index strides
  std::size_t total_ = 0;
  std::vector<NodeClass> cls_;
  std::vector<std::uint8_t> valued_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> strip_;
  std::vector<std::size_t> layer_;
};

/// Builds the lattice for the given spacing and boundary-layer width.
/// Requires 0 < h <= epsilon and 1 <= dim <= 6.
Grid build_grid(const Domain& domain, double h, double epsilon);

/// One time level of node values. Values are stored densely; nodes that carry
/// no value hold NaN and must never be read (interpolation asserts this).
struct ValueSlice {
  double time = 0.0;
  double epsilon = 0.0;
  std::vector<double> values;
};

/// Multilinear interpolation of a slice at x. Exact on affine functions and
/// monotone (the result lies within the surrounding node values). Requires x
/// within grid coverage and a complete stencil.
double interpolate(const ValueSlice& slice, const Grid& grid, const Vec& x);

}  // namespace eigenflow
