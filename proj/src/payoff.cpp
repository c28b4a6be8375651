#include "eigenflow/payoff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eigenflow {

double eval_payoff(const PayoffData& data, const Domain& domain, const Vec& x, double t) {
  if (t <= 0.0) {
    ++data.counters->u0_evals;
    return data.u0(x);
  }
  // Margin-aware: a point grazing the boundary within rounding may be read
  // as boundary data even if it is nominally inside the open set.
  if (domain.inside_by_margin(x))
    throw std::logic_error("eval_payoff: interior point queried at positive time " +
                           std::to_string(t) + " at x=" + x.str());
  ++data.counters->g_evals;
  return data.g(x, t);
}

void check_compatibility(const PayoffData& data, const Grid& grid, double tol) {
  double worst = 0.0;
  std::size_t worst_id = 0;
  for (std::size_t id : grid.boundary_layer_nodes()) {
    const Vec x = grid.point(id);
    const double gap = std::fabs(data.g(x, 0.0) - data.u0(x));
    if (gap > worst) {
      worst = gap;
      worst_id = id;
    }
  }
  if (worst > tol)
    throw std::invalid_argument("payoff data incompatible: |g(x,0) - u0(x)| = " +
                                std::to_string(worst) + " at node " +
                                grid.point(worst_id).str());
}

}  // namespace eigenflow
