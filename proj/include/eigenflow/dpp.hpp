#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "eigenflow/frames.hpp"
#include "eigenflow/grid.hpp"
#include "eigenflow/payoff.hpp"

namespace eigenflow {

/// Discretization parameters shared by the value iteration solvers.
struct DppConfig {
  double epsilon = 0.1;      ///< step length; one round advances time by epsilon^2/2
  int j = 1;                 ///< eigenvalue index (1 = smallest, N = largest)
  double horizon = 1.0;      ///< final time for the time-dependent solver
  double h = 0.05;           ///< lattice spacing, h <= epsilon
  int resolution = 90;       ///< frame/sphere sampling resolution
  std::uint64_t seed = 1;    ///< seed for the frame sampling
  double fixed_point_tol = 1e-6;  ///< sup-norm stopping threshold, stationary solver
  int max_sweeps = 60000;         ///< sweep cap for the stationary solver
  int keep_every = 1;             ///< store every k-th time level (first and last always kept)

  void validate(int dim) const;  ///< throws naming the offending key, e.g. "solver.h"
};

/// Counters and notes describing one solver run.
struct RunLog {
  int levels = 0;
  int sweeps = 0;
  std::uint64_t boundary_evals = 0;
  std::uint64_t initial_evals = 0;
  std::uint64_t one_sided_stencils = 0;
  double wall_ms = 0.0;
  int workers = 1;
  std::vector<std::string> notes;
};

/// One min-max evaluation: which frame the minimizing player picks, which
/// sampled direction inside it the maximizing player picks, and the value.
struct ScanChoice {
  std::size_t frame_index = 0;
  std::size_t sample_index = 0;
  double value = 0.0;
  Vec direction;  ///< ambient unit vector of the chosen (frame, sample) pair
};

/// The dynamic-programming step operator
///   u(x) <- min over frames S, max over sampled unit v in S of
///             ( u_prev(x + eps v) + u_prev(x - eps v) ) / 2,
/// where off-lattice interior evaluations interpolate the previous level and
/// points beyond the domain read the exit payoff. Ties resolve to the first
/// candidate in frame/sample order, which keeps runs reproducible.
class DppOperator {
 public:
  enum class Mode {
    TimeDependent,  ///< exits before time zero read u0; the clock advances
    Stationary      ///< no clock; exits always read g
  };

  DppOperator(const Grid& grid, PayoffData payoff, FrameSet frames, double epsilon, Mode mode);

  const Grid& grid() const { return *grid_; }
  const FrameSet& frames() const { return frames_; }
  double epsilon() const { return eps_; }
  Mode mode() const { return mode_; }
  const PayoffData& payoff() const { return payoff_; }

  /// Exit-aware point evaluation: interpolates `prev` inside the domain,
  /// reads the exit payoff at time t_prev outside it.
  double eval(const ValueSlice& prev, const Vec& y, double t_prev) const;

  /// Two-point average along +/- eps v from x.
  double average(const ValueSlice& prev, const Vec& x, const Vec& v, double t_prev) const;

  /// Full min-max scan at an arbitrary point (not just lattice nodes).
  ScanChoice scan(const ValueSlice& prev, const Vec& x, double t_prev) const;

  /// Advances one level: recomputes interior nodes from `prev`, pins the
  /// boundary layer to the exit payoff at time t.
  ValueSlice step(const ValueSlice& prev, double t) const;

  /// Slice holding the exit payoff at time t at every value-carrying node.
  ValueSlice payoff_slice(double t) const;

 private:
  const Grid* grid_;
  PayoffData payoff_;
  FrameSet frames_;
  double eps_;
  Mode mode_;
  std::vector<std::vector<Vec>> directions_;  // ambient (frame, sample) table
};

/// One backward-construction step as a free operation (builds the operator
/// internally; prefer DppOperator for repeated stepping).
ValueSlice dpp_update(const ValueSlice& prev, const Grid& grid, const PayoffData& payoff,
                      const FrameSet& frames, double epsilon, double t);

struct ParabolicResult {
  Grid grid;
  std::vector<ValueSlice> slices;  ///< every keep_every-th level; first and last included
  RunLog log;
};

/// Called after each computed level with (level index, slice).
using LevelObserver = std::function<void(int, const ValueSlice&)>;

/// Runs the time-dependent value iteration from u0 at time levels
/// t_k = k * epsilon^2 / 2 up to the first level at or past the horizon.
/// Every stored value lies between the exit payoff's extremes.
ParabolicResult solve_parabolic(const Domain& domain, const PayoffData& payoff,
                                const DppConfig& config, const LevelObserver& observer = {});

struct EllipticResult {
  Grid grid;
  ValueSlice value;
  int sweeps = 0;
  double residual = 0.0;
  bool converged = false;
  RunLog log;
};

/// Fixed point of the stationary operator with exterior data g, by Jacobi
/// sweeps from the constant initial guess. Non-convergence is reported in the
/// result (residual and flag), not thrown: callers decide how to surface it.
EllipticResult solve_elliptic(const Domain& domain,
                              const std::function<double(const Vec&)>& g,
                              const DppConfig& config, double initial_guess);

}  // namespace eigenflow
