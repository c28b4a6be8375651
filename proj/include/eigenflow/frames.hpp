#pragma once

#include <cstdint>
#include <vector>

#include "eigenflow/eig.hpp"
#include "eigenflow/vec.hpp"

namespace eigenflow {

/// Deterministic discretization of the j-dimensional subspaces of R^N
/// together with a shared unit-sphere sampling inside each subspace.
///
/// Construction rules, all reproducible from (dim, j, resolution, seed):
///  - j = 1: frames are single directions; in R^2 the equally spaced angles
///    i*pi/resolution, in higher dimension the coordinate axes followed by
///    `resolution` seeded unit vectors. Sphere sampling is exactly {+e, -e}.
///  - j = N: one frame (the whole space); the sphere sampling reuses the j=1
///    direction list (closed under v -> -v), which makes index duality between
///    j = 1 and j = N exact at matched resolution.
///  - 1 < j < N: all C(N, j) coordinate-axis frames first, then `resolution`
///    frames obtained by Gram-Schmidt on seeded Gaussian draws. Sphere
///    sampling in the frame coordinates follows the same direction-list rules
///    in dimension j.
///
/// Sphere samples are stored one per antipodal pair: v and -v enter every
/// two-point average symmetrically, so scans iterate representatives only.
struct FrameSet {
  int dim = 0;
  int j = 0;
  int resolution = 0;
  std::uint64_t seed = 0;

  /// Each frame is a list of j orthonormal ambient vectors.
  std::vector<std::vector<Vec>> frames;
  /// Unit vectors in R^j, one representative per antipodal pair.
  std::vector<Vec> sphere_half;

  std::size_t frame_count() const { return frames.size(); }
  std::size_t sample_count() const { return sphere_half.size(); }

  /// Ambient unit vector of sample s expressed in frame f's coordinates.
  Vec ambient(std::size_t f, const Vec& s) const;
  Vec ambient(std::size_t f, std::size_t sample_index) const {
    return ambient(f, sphere_half[sample_index]);
  }

  /// Full antipodally closed sample list (representatives plus negations).
  std::vector<Vec> sphere_full() const;

  /// Frame set consisting of the coordinate-axis frames only, with the same
  /// sphere sampling rules; resolves diagonal matrices exactly.
  static FrameSet coordinate_frames(int dim, int j, int sphere_resolution, std::uint64_t seed);
};

/// Builds the standard frame set. Requires 1 <= j <= dim <= 6, resolution >= 1.
FrameSet generate_frames(int dim, int j, int resolution, std::uint64_t seed);

/// Discrete min-max: the smallest over frames of the largest sampled Rayleigh
/// quotient within the frame. Converges to lambda_j from the subspace
/// variational characterization as the sampling refines; never falls below
/// lambda_j by more than the in-frame sphere sampling error.
double courant_fischer(const SymMatrix& a, int j, const FrameSet& frames);

}  // namespace eigenflow
