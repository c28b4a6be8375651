#include "eigenflow/fdiff.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eigenflow/parallel.hpp"

namespace eigenflow {

double FdConfig::effective_dt(int dim) const {
  const double bound = h * h / (2.0 * static_cast<double>(dim));
  return dt > 0.0 ? dt : bound;
}

void FdConfig::validate(int dim) const {
  if (!(h > 0.0)) throw std::invalid_argument("solver.h must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("solver.horizon must be positive");
  if (j < 1 || j > dim)
    throw std::invalid_argument("solver.j must lie in [1, " + std::to_string(dim) + "]");
  if (keep_every < 1) throw std::invalid_argument("solver.keep_every must be >= 1");
  const double bound = h * h / (2.0 * static_cast<double>(dim));
  if (dt > bound * (1.0 + 1e-12))
    throw std::invalid_argument("solver.dt violates the stability bound h^2/(2N) = " +
                                std::to_string(bound));
}

namespace {

double value_at(const ValueSlice& slice, const Grid& grid, std::size_t id) {
  const double v = slice.values[id];
  if (std::isnan(v))
    throw std::logic_error("discrete_hessian: stencil touches a node that carries no value");
  return v;
}

// Tries lattice offsets until one with a stored value is found. Offsets are
// ordered nearest-first; the caller flags any fallback past the first.
bool shifted_value(const ValueSlice& slice, const Grid& grid, std::size_t id,
                   std::vector<int>& steps, double& out) {
  std::size_t nb = 0;
  if (!grid.shift(id, steps, nb)) return false;
  if (!grid.carries_value(nb)) return false;
  out = slice.values[nb];
  return true;
}

}  // namespace

SymMatrix discrete_hessian(const ValueSlice& slice, const Grid& grid, std::size_t node,
                           std::uint64_t* one_sided) {
  const int n = grid.dim();
  if (grid.classify(node) != NodeClass::Interior)
    throw std::invalid_argument("discrete_hessian: node is not interior");
  const double h = grid.spacing();
  const double h2 = h * h;
  SymMatrix hess(n);
  std::vector<int> steps(n, 0);

  const double center = value_at(slice, grid, node);
  std::vector<double> plus(n), minus(n);
  for (int i = 0; i < n; ++i) {
    steps.assign(n, 0);
    steps[i] = 1;
    double vp = 0.0, vm = 0.0;
    if (!shifted_value(slice, grid, node, steps, vp))
      throw std::logic_error("discrete_hessian: axis neighbor missing; boundary layer too thin");
    steps[i] = -1;
    if (!shifted_value(slice, grid, node, steps, vm))
      throw std::logic_error("discrete_hessian: axis neighbor missing; boundary layer too thin");
    plus[i] = vp;
    minus[i] = vm;
    hess.set(i, i, (vp - 2.0 * center + vm) / h2);
  }

  for (int i = 0; i < n - 1; ++i) {
    for (int k = i + 1; k < n; ++k) {
      double vpp = 0.0, vpm = 0.0, vmp = 0.0, vmm = 0.0;
      steps.assign(n, 0);
      steps[i] = 1;
      steps[k] = 1;
      const bool pp = shifted_value(slice, grid, node, steps, vpp);
      steps[i] = 1;
      steps[k] = -1;
      const bool pm = shifted_value(slice, grid, node, steps, vpm);
      steps[i] = -1;
      steps[k] = 1;
      const bool mp = shifted_value(slice, grid, node, steps, vmp);
      steps[i] = -1;
      steps[k] = -1;
      const bool mm = shifted_value(slice, grid, node, steps, vmm);

      double cross;
      if (pp && pm && mp && mm) {
        cross = (vpp - vpm - vmp + vmm) / (4.0 * h2);
      } else {
        // One-sided copy: the first available L-shaped variant, preferring the
        // orientation whose diagonal point exists.
        if (one_sided) ++*one_sided;
        if (pp) {
          cross = (vpp - plus[i] - plus[k] + center) / h2;
        } else if (pm) {
          cross = (plus[i] + minus[k] - vpm - center) / h2;
        } else if (mp) {
          cross = (minus[i] + plus[k] - vmp - center) / h2;
        } else if (mm) {
          cross = (vmm - minus[i] - minus[k] + center) / h2;
        } else {
          throw std::logic_error("discrete_hessian: no usable cross stencil at node");
        }
      }
      hess.set(i, k, cross);
    }
  }
  return hess;
}

FdResult solve_fd(const Domain& domain, const PayoffData& payoff, const FdConfig& config,
                  const LevelObserver& observer) {
  config.validate(domain.dim());
  const auto start = std::chrono::steady_clock::now();
  const int n = domain.dim();
  const double dt = config.effective_dt(n);

  // Boundary layer must admit the full diagonal stencil, so the grid is built
  // with layer width h * sqrt(N).
  const double layer = config.h * std::sqrt(static_cast<double>(n));
  FdResult result{build_grid(domain, config.h, layer), {}, {}};
  check_compatibility(payoff, result.grid);
  const Grid& grid = result.grid;
  result.log.workers = worker_count();

  const int levels = static_cast<int>(std::ceil(config.horizon / dt - 1e-9));

  ValueSlice current;
  current.time = 0.0;
  current.epsilon = layer;
  current.values.assign(grid.node_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t id : grid.interior_nodes()) {
    ++payoff.counters->u0_evals;
    current.values[id] = payoff.u0(grid.point(id));
  }
  for (std::size_t id : grid.boundary_layer_nodes())
    current.values[id] = eval_payoff(payoff, domain, grid.point(id), 0.0);

  if (observer) observer(0, current);
  result.slices.push_back(current);

  std::atomic<std::uint64_t> one_sided{0};
  const auto& interior = grid.interior_nodes();
  for (int k = 1; k <= levels; ++k) {
    const double t = dt * static_cast<double>(k);
    ValueSlice next;
    next.time = t;
    next.epsilon = layer;
    next.values.assign(grid.node_count(), std::numeric_limits<double>::quiet_NaN());

    parallel_for(interior.size(), [&](std::size_t i) {
      const std::size_t id = interior[i];
      std::uint64_t local = 0;
      const SymMatrix hess = discrete_hessian(current, grid, id, &local);
      if (local) one_sided += local;
      next.values[id] = current.values[id] + dt * lambda_j(hess, config.j);
    });
    for (std::size_t id : grid.boundary_layer_nodes())
      next.values[id] = eval_payoff(payoff, domain, grid.point(id), t);

    if (observer) observer(k, next);
    const bool keep = (k % config.keep_every == 0) || k == levels;
    current = std::move(next);
    if (keep) result.slices.push_back(current);
  }

  result.log.levels = levels;
  result.log.one_sided_stencils = one_sided.load();
  if (result.log.one_sided_stencils > 0)
    result.log.notes.push_back(std::to_string(result.log.one_sided_stencils) +
                               " cross stencils fell back to one-sided differences");
  result.log.boundary_evals = payoff.counters->g_evals;
  result.log.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return result;
}

}  // namespace eigenflow
