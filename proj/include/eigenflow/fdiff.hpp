#pragma once

#include <vector>

#include "eigenflow/dpp.hpp"
#include "eigenflow/eig.hpp"
#include "eigenflow/grid.hpp"
#include "eigenflow/payoff.hpp"

namespace eigenflow {

/// Explicit finite-difference marching parameters. The time step must respect
/// dt <= h^2 / (2N); the constructor-style validate enforces it.
struct FdConfig {
  double h = 0.05;
  double dt = 0.0;       ///< 0 picks the stability bound h^2/(2N) exactly
  double horizon = 1.0;
  int j = 1;
  int keep_every = 1;

  double effective_dt(int dim) const;
  void validate(int dim) const;
};

/// Second-difference Hessian at an interior node: central second differences
/// on the diagonal, four-point centered cross differences off the diagonal.
/// When a cross stencil would touch a node that carries no value, the nearest
/// one-sided variant is used instead and the event is counted in `one_sided`.
SymMatrix discrete_hessian(const ValueSlice& slice, const Grid& grid, std::size_t node,
                           std::uint64_t* one_sided = nullptr);

struct FdResult {
  Grid grid;
  std::vector<ValueSlice> slices;
  RunLog log;
};

/// Explicit marching u <- u + dt * lambda_j(D^2_h u) with the boundary layer
/// pinned to the exit payoff per level. An independent route to the same
/// evolution as the game-based solver, used for cross-validation.
FdResult solve_fd(const Domain& domain, const PayoffData& payoff, const FdConfig& config,
                  const LevelObserver& observer = {});

}  // namespace eigenflow
