#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "eigenflow/domain.hpp"
#include "eigenflow/grid.hpp"
#include "eigenflow/vec.hpp"

namespace eigenflow {

/// Boundary and initial data for one problem. g supplies values on the
/// exterior layer for positive times, u0 supplies values at and before the
/// start time (everywhere the lattice carries values). Both must be evaluable
/// slightly beyond the epsilon layer (the interpolation halo).
struct PayoffData {
  std::function<double(const Vec&, double)> g;
  std::function<double(const Vec&)> u0;
  bool time_dependent_g = false;

  /// Evaluation counters, shared across copies; lets tests assert which data
  /// a solver actually consulted.
  struct Counters {
    std::uint64_t g_evals = 0;
    std::uint64_t u0_evals = 0;
  };
  std::shared_ptr<Counters> counters = std::make_shared<Counters>();
};

/// Exit payoff of the underlying process: u0 for times at or before zero,
/// g for exterior points at positive times. Querying an interior point at a
/// positive time is a contract violation and throws.
double eval_payoff(const PayoffData& data, const Domain& domain, const Vec& x, double t);

/// Checks u0 = g(.,0) on the grid's exterior layer nodes (the data must agree
/// where the two cases of the exit payoff meet). Throws naming the worst node
/// when the mismatch exceeds tol.
void check_compatibility(const PayoffData& data, const Grid& grid, double tol = 1e-9);

}  // namespace eigenflow
