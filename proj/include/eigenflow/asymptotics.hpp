#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "eigenflow/dpp.hpp"
#include "eigenflow/domain.hpp"
#include "eigenflow/eig.hpp"
#include "eigenflow/grid.hpp"

namespace eigenflow {

/// Affine function x -> <gradient, x> + offset.
struct Affine {
  Vec gradient;
  double offset = 0.0;

  double operator()(const Vec& x) const { return dot(gradient, x) + offset; }
};

// ---------------------------------------------------------------------------
// Exponential decay of the gap to the stationary solution.

struct DecayFit {
  std::vector<double> times;  ///< full gap curve, ascending times
  std::vector<double> gaps;   ///< sup-norm gaps d(t) over the fitted node set
  double mu = 0.0;            ///< fitted decay rate (1/time)
  double amplitude = 0.0;     ///< fitted C in C * exp(-mu t)
  double r_squared = 0.0;
  std::size_t fit_begin = 0;  ///< fitted window [fit_begin, fit_end) into times
  std::size_t fit_end = 0;
  bool valid = false;             ///< enough points above the floor and R^2 >= 0.9
  bool already_converged = false; ///< every gap at or below the noise floor
  std::string note;
};

/// Log-linear least squares of gap(t) ~ C exp(-mu t) over the window where
/// gap > noise_floor, with the first fifth of that window dropped as
/// transient. Needs at least 10 points after the drop.
DecayFit fit_decay_curve(std::vector<double> times, std::vector<double> gaps,
                         double noise_floor);

/// Gap curve d(t) = max over `nodes` of |u(x,t) - z(x)|, then fit_decay_curve.
DecayFit fit_decay(const std::vector<ValueSlice>& slices, const Grid& grid, const ValueSlice& z,
                   double noise_floor, const std::vector<std::size_t>& nodes);

/// Same over all interior nodes.
DecayFit fit_decay(const std::vector<ValueSlice>& slices, const Grid& grid, const ValueSlice& z,
                   double noise_floor);

// ---------------------------------------------------------------------------
// Principal eigenpair of the extreme-eigenvalue operators.

/// Largest: -lambda_N(D^2 psi) = mu psi with psi > 0 in the domain.
/// Smallest: -lambda_1(D^2 phi) = mu phi with phi < 0 (phi = -psi).
enum class EigenMode { Largest, Smallest };

struct EigenEstimate {
  Grid grid;
  double mu = 0.0;
  ValueSlice profile;  ///< sup-norm 1; positive (Largest) or negative (Smallest)
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> mu_history;  ///< per-iteration rate estimates
  std::string note;
};

/// Power-style renormalized evolution: march the zero-boundary-data operator
/// from a constant profile, renormalize to sup-norm 1 each step, and read the
/// rate off the per-step decay factor, mu = -(2/eps^2) log(factor). Uses j = N
/// for Largest and j = 1 for Smallest regardless of config.j. Non-convergence
/// (oscillating factor) is reported through `converged` and `note`.
EigenEstimate estimate_principal_eigenvalue(const Domain& domain, EigenMode mode,
                                            DppConfig config);

// ---------------------------------------------------------------------------
// Radial barrier (exact analytic check).

struct BarrierReport {
  int dim = 0;
  double r = 0.0;
  double c = 0.0;
  double c1 = 0.0;  ///< slope of the conical outer part, c * r / 2
  double c2 = 0.0;  ///< center value, 3 c r^2 / 8
  double value_continuity_gap = 0.0;      ///< |a| mismatch across |x| = r/2
  double derivative_continuity_gap = 0.0; ///< radial slope mismatch across |x| = r/2
  double boundary_value_gap = 0.0;        ///< |a(r)|
  double max_inside_residual = 0.0;       ///< sup |(-lambda_N(D^2 a)) - c| over inside samples
  double max_annulus_residual = 0.0;      ///< sup |(-lambda_N(D^2 a))| over annulus samples
  bool ok = false;                        ///< every gap within 1e-12
};

/// Piecewise value of the barrier by radius: c2 - (c/2) s^2 for s <= r/2,
/// c1 (r - s) on the annulus.
double radial_barrier_value(double r, double c, double s);

/// Exact Hessian of the barrier at offset x from its center.
SymMatrix radial_barrier_hessian(int dim, double r, double c, const Vec& x);

/// Checks the defining identities at the given sample offsets: Hessian
/// eigenvalues give -lambda_N = c inside the half ball and 0 on the annulus,
/// plus value/derivative continuity at r/2 and a = 0 on the boundary sphere.
/// Offsets exactly at |x| = r/2 take the inside branch.
BarrierReport verify_radial_barrier(double r, double c, const std::vector<Vec>& points);

/// Deterministic default sample offsets: several radii on each coordinate
/// axis and one diagonal direction, avoiding the r/2 kink itself.
std::vector<Vec> barrier_sample_points(int dim, double r);

// ---------------------------------------------------------------------------
// Finite-time coincidence with the stationary solution.

struct CoincidenceReport {
  double tol = 0.0;
  double horizon = 0.0;                ///< last computed time level
  std::vector<std::size_t> nodes;      ///< examined grid node ids
  std::vector<double> t_star;          ///< per node; +inf when censored
  double global_t = 0.0;               ///< sup over nodes; +inf if any censored
  std::size_t censored_nodes = 0;
  bool censored = false;
};

/// Per-node first time from which |u(x,t) - z(x)| <= tol holds for every
/// later computed level. A node violating at the last level is censored.
CoincidenceReport detect_coincidence(const std::vector<ValueSlice>& slices, const Grid& grid,
                                     const ValueSlice& z, double tol);

enum class Side { Below, Above };

/// One-sided variant: Below tests u <= z + tol, Above tests u >= z - tol.
CoincidenceReport one_sided_coincidence(const std::vector<ValueSlice>& slices, const Grid& grid,
                                        const ValueSlice& z, double tol, Side side);

// ---------------------------------------------------------------------------
// Half-space variant of the affine coincidence.

struct HalfspaceBucket {
  double s_lo = 0.0;  ///< bucket range in s = <x, w> - theta
  double s_hi = 0.0;
  double max_t_star = 0.0;  ///< +inf when the bucket holds a censored node
  std::size_t nodes = 0;
  std::size_t censored = 0;
};

struct HalfspaceReport {
  CoincidenceReport base;  ///< restricted to nodes with <x, w> > theta
  Vec w;
  double theta = 0.0;
  std::vector<HalfspaceBucket> buckets;      ///< ascending in s
  std::size_t monotonicity_violations = 0;   ///< bucket pairs breaking t* decay in s
};

/// One-sided coincidence restricted to {<x, w> > theta}, bucketed by distance
/// to the hyperplane. Waiting times should shrink away from the hyperplane;
/// a later bucket exceeding an earlier one by more than one time level (plus
/// jitter) counts as a monotonicity violation. Empty buckets are skipped.
HalfspaceReport halfspace_coincidence(const std::vector<ValueSlice>& slices, const Grid& grid,
                                      const ValueSlice& z, double tol, Side side, const Vec& w,
                                      double theta, int buckets = 8);

/// Full pipeline for the canonical half-space experiment: boundary datum
/// g = pi + max(0, theta - <x, w>), initial datum g plus the inscribed-ball
/// bump (r^2 - |x - anchor|^2)+, solved with the time-dependent operator,
/// then compared one-sidedly against pi on {<x, w> > theta}. The side is
/// Below for j = 1 and Above for j = N; other j are rejected. tol = 0 picks
/// max(0.02, 3 epsilon). The bump vanishes outside the inscribed ball, which
/// keeps the initial datum compatible with g on the boundary strip.
HalfspaceReport halfspace_scenario(const Domain& domain, const Affine& pi, const Vec& w,
                                   double theta, const DppConfig& config, double tol = 0.0);

// ---------------------------------------------------------------------------
// Two-sided exponential sandwich against an enclosing-ball eigenpair.

struct SandwichReport {
  double mu = 0.0;       ///< enclosing-ball rate used
  double c_lower = 0.0;  ///< amplitude fitted to the negative part of u - z
  double c_upper = 0.0;  ///< amplitude fitted to the positive part
  std::size_t fit_level = 0;
  std::size_t checked_levels = 0;
  std::size_t violations = 0;
  double max_overshoot = 0.0;  ///< worst exceedance beyond bound + slack
  bool ok = false;
};

/// Fits the two amplitudes at `fit_level` so the bounds touch there, then
/// checks z - C1 e^{-mu t} psi <= u <= z + C2 e^{-mu t} psi at every later
/// stored level, with `slack` absolute tolerance. `enclosing` must be a
/// Largest-mode estimate whose grid covers this grid's interior nodes.
SandwichReport sandwich_check(const std::vector<ValueSlice>& slices, const Grid& grid,
                              const ValueSlice& z, const EigenEstimate& enclosing,
                              std::size_t fit_level, double slack);

}  // namespace eigenflow
