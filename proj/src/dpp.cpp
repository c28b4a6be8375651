#include "eigenflow/dpp.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eigenflow/parallel.hpp"

namespace eigenflow {

void DppConfig::validate(int dim) const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("solver.epsilon must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("solver.h must be positive");
  if (h > epsilon + 1e-15)
    throw std::invalid_argument("solver.h must not exceed solver.epsilon");
  if (j < 1 || j > dim)
    throw std::invalid_argument("solver.j must lie in [1, " + std::to_string(dim) + "]");
  if (!(horizon > 0.0)) throw std::invalid_argument("solver.horizon must be positive");
  if (resolution < 1) throw std::invalid_argument("solver.resolution must be >= 1");
  if (!(fixed_point_tol > 0.0))
    throw std::invalid_argument("solver.fixed_point_tol must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("solver.max_sweeps must be >= 1");
  if (keep_every < 1) throw std::invalid_argument("solver.keep_every must be >= 1");
}

DppOperator::DppOperator(const Grid& grid, PayoffData payoff, FrameSet frames, double epsilon,
                         Mode mode)
    : grid_(&grid), payoff_(std::move(payoff)), frames_(std::move(frames)), eps_(epsilon),
      mode_(mode) {
  if (frames_.dim != grid.dim())
    throw std::invalid_argument("DppOperator: frame dimension does not match the grid");
  if (!(epsilon > 0.0)) throw std::invalid_argument("DppOperator: epsilon must be positive");
  // The grid's boundary layer must be at least as wide as the step length,
  // otherwise a move from an interior node could land beyond stored data.
  if (epsilon > grid.epsilon() + 1e-12)
    throw std::invalid_argument("DppOperator: step epsilon exceeds the grid's layer width");
  directions_.resize(frames_.frame_count());
  for (std::size_t f = 0; f < frames_.frame_count(); ++f) {
    directions_[f].reserve(frames_.sample_count());
    for (std::size_t s = 0; s < frames_.sample_count(); ++s)
      directions_[f].push_back(frames_.ambient(f, s));
  }
}

double DppOperator::eval(const ValueSlice& prev, const Vec& y, double t_prev) const {
  if (grid_->domain().inside(y)) return interpolate(prev, *grid_, y);
  if (mode_ == Mode::Stationary) {
    ++payoff_.counters->g_evals;
    return payoff_.g(y, 1.0);
  }
  return eval_payoff(payoff_, grid_->domain(), y, t_prev);
}

double DppOperator::average(const ValueSlice& prev, const Vec& x, const Vec& v,
                            double t_prev) const {
  return 0.5 * eval(prev, x + eps_ * v, t_prev) + 0.5 * eval(prev, x - eps_ * v, t_prev);
}

ScanChoice DppOperator::scan(const ValueSlice& prev, const Vec& x, double t_prev) const {
  ScanChoice best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < directions_.size(); ++f) {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t worst_s = 0;
    for (std::size_t s = 0; s < directions_[f].size(); ++s) {
      const double a = average(prev, x, directions_[f][s], t_prev);
      if (a > worst) {
        worst = a;
        worst_s = s;
      }
    }
    if (worst < best.value) {
      best.value = worst;
      best.frame_index = f;
      best.sample_index = worst_s;
    }
  }
  best.direction = directions_[best.frame_index][best.sample_index];
  return best;
}

ValueSlice DppOperator::step(const ValueSlice& prev, double t) const {
  const double t_prev = t - 0.5 * eps_ * eps_;
  ValueSlice next;
  next.time = t;
  next.epsilon = eps_;
  next.values.assign(grid_->node_count(), std::numeric_limits<double>::quiet_NaN());

  const auto& interior = grid_->interior_nodes();
  parallel_for(interior.size(), [&](std::size_t i) {
    const std::size_t id = interior[i];
    next.values[id] = scan(prev, grid_->point(id), t_prev).value;
  });

  for (std::size_t id : grid_->boundary_layer_nodes()) {
    const Vec x = grid_->point(id);
    if (mode_ == Mode::Stationary) {
      ++payoff_.counters->g_evals;
      next.values[id] = payoff_.g(x, 1.0);
    } else {
      next.values[id] = eval_payoff(payoff_, grid_->domain(), x, t);
    }
  }
  return next;
}

ValueSlice DppOperator::payoff_slice(double t) const {
  ValueSlice slice;
  slice.time = t;
  slice.epsilon = eps_;
  slice.values.assign(grid_->node_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t id : grid_->interior_nodes()) {
    const Vec x = grid_->point(id);
    slice.values[id] = (mode_ == Mode::Stationary) ? payoff_.g(x, 1.0)
                                                   : eval_payoff(payoff_, grid_->domain(), x,
                                                                 std::min(t, 0.0));
  }
  for (std::size_t id : grid_->boundary_layer_nodes()) {
    const Vec x = grid_->point(id);
    if (mode_ == Mode::Stationary) {
      ++payoff_.counters->g_evals;
      slice.values[id] = payoff_.g(x, 1.0);
    } else {
      slice.values[id] = eval_payoff(payoff_, grid_->domain(), x, t);
    }
  }
  return slice;
}

ValueSlice dpp_update(const ValueSlice& prev, const Grid& grid, const PayoffData& payoff,
                      const FrameSet& frames, double epsilon, double t) {
  DppOperator op(grid, payoff, frames, epsilon, DppOperator::Mode::TimeDependent);
  return op.step(prev, t);
}

ParabolicResult solve_parabolic(const Domain& domain, const PayoffData& payoff,
                                const DppConfig& config, const LevelObserver& observer) {
  config.validate(domain.dim());
  const auto start = std::chrono::steady_clock::now();

  ParabolicResult result{build_grid(domain, config.h, config.epsilon), {}, {}};
  check_compatibility(payoff, result.grid);
  FrameSet frames = generate_frames(domain.dim(), config.j, config.resolution, config.seed);
  DppOperator op(result.grid, payoff, frames, config.epsilon, DppOperator::Mode::TimeDependent);

  const double dt = 0.5 * config.epsilon * config.epsilon;
  const int levels = static_cast<int>(std::ceil(config.horizon / dt - 1e-9));

  result.log.workers = worker_count();

  ValueSlice current = op.payoff_slice(0.0);
  result.log.initial_evals = payoff.counters->u0_evals;
  if (observer) observer(0, current);
  result.slices.push_back(current);

  for (int k = 1; k <= levels; ++k) {
    const double t = dt * static_cast<double>(k);
    ValueSlice next = op.step(current, t);
    if (observer) observer(k, next);
    const bool keep = (k % config.keep_every == 0) || k == levels;
    current = std::move(next);
    if (keep) result.slices.push_back(current);
  }

  result.log.levels = levels;
  result.log.boundary_evals = payoff.counters->g_evals;
  result.log.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return result;
}

EllipticResult solve_elliptic(const Domain& domain, const std::function<double(const Vec&)>& g,
                              const DppConfig& config, double initial_guess) {
  config.validate(domain.dim());
  const auto start = std::chrono::steady_clock::now();

  EllipticResult result{build_grid(domain, config.h, config.epsilon), {}, 0, 0.0, false, {}};
  FrameSet frames = generate_frames(domain.dim(), config.j, config.resolution, config.seed);
  PayoffData payoff;
  payoff.g = [&g](const Vec& x, double) { return g(x); };
  payoff.u0 = [&g](const Vec& x) { return g(x); };
  DppOperator op(result.grid, payoff, frames, config.epsilon, DppOperator::Mode::Stationary);

  result.log.workers = worker_count();

  ValueSlice current;
  current.time = 0.0;
  current.epsilon = config.epsilon;
  current.values.assign(result.grid.node_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t id : result.grid.interior_nodes()) current.values[id] = initial_guess;
  for (std::size_t id : result.grid.boundary_layer_nodes())
    current.values[id] = g(result.grid.point(id));

  double residual = std::numeric_limits<double>::infinity();
  int sweep = 0;
  while (sweep < config.max_sweeps) {
    ++sweep;
    ValueSlice next = op.step(current, 0.0);
    residual = 0.0;
    for (std::size_t id : result.grid.interior_nodes())
      residual = std::max(residual, std::fabs(next.values[id] - current.values[id]));
    current = std::move(next);
    if (residual <= config.fixed_point_tol) break;
  }

  result.value = std::move(current);
  result.sweeps = sweep;
  result.residual = residual;
  result.converged = residual <= config.fixed_point_tol;
  if (!result.converged)
    result.log.notes.push_back("fixed point not reached: residual " + std::to_string(residual) +
                               " after " + std::to_string(sweep) + " sweeps");
  result.log.sweeps = sweep;
  result.log.boundary_evals = payoff.counters->g_evals;
  result.log.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return result;
}

}  // namespace eigenflow
