#include "eigenflow/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "eigenflow/parallel.hpp"

namespace eigenflow {

namespace {

// Stream salts separating the coin sequence, the strategies' private
// randomness, and per-trajectory seeds.
constexpr std::uint64_t kCoinStream = 0x636f696e20666c70ULL;
constexpr std::uint64_t kStrategyStream = 0x7374726174656779ULL;
constexpr std::uint64_t kTrajectoryStream = 0x7472616a6563746fULL;

constexpr double kFrameTol = 1e-9;

void validate_frame(const std::vector<Vec>& frame, int dim, int j) {
  if (static_cast<int>(frame.size()) != j)
    throw std::invalid_argument("game: minimizer offered " + std::to_string(frame.size()) +
                                " vectors, expected a " + std::to_string(j) + "-frame");
  for (int a = 0; a < j; ++a) {
    if (frame[a].dim() != dim)
      throw std::invalid_argument("game: frame vector dimension mismatch");
    if (std::abs(norm(frame[a]) - 1.0) > kFrameTol)
      throw std::invalid_argument("game: minimizer offered a non-unit frame vector");
    for (int b = 0; b < a; ++b)
      if (std::abs(dot(frame[a], frame[b])) > kFrameTol)
        throw std::invalid_argument("game: minimizer offered a non-orthogonal frame");
  }
}

void validate_direction(const Vec& v, const std::vector<Vec>& frame, int dim) {
  if (v.dim() != dim) throw std::invalid_argument("game: direction dimension mismatch");
  if (std::abs(norm(v) - 1.0) > kFrameTol)
    throw std::invalid_argument("game: maximizer returned a non-unit direction");
  Vec residual = v;
  for (const Vec& f : frame) residual -= dot(v, f) * f;
  if (norm(residual) > kFrameTol)
    throw std::invalid_argument("game: maximizer left the offered subspace");
}

}  // namespace

GameTrajectory play(const GameSetup& setup, const FrameRule& minimizer,
                    const DirectionRule& maximizer, const Vec& x0, double t0,
                    std::uint64_t seed, bool record_full) {
  if (!setup.domain || !setup.payoff || !setup.frames)
    throw std::invalid_argument("game: setup is missing domain, payoff, or frames");
  if (!(setup.epsilon > 0.0)) throw std::invalid_argument("game: epsilon must be positive");
  const Domain& domain = *setup.domain;
  const FrameSet& fs = *setup.frames;
  const int dim = domain.dim();
  if (fs.dim != dim) throw std::invalid_argument("game: frame set dimension mismatch");
  if (!domain.inside(x0))
    throw std::invalid_argument("game: start position " + x0.str() + " is not interior");
  const bool clocked = setup.mode == DppOperator::Mode::TimeDependent;
  if (clocked && !(t0 > 0.0))
    throw std::invalid_argument("game: time-dependent play needs a positive start time");

  const double eps = setup.epsilon;
  const double dt = 0.5 * eps * eps;
  const double clock_tol = dt * 1e-9;
  // The clock loses dt every round, so the round count cannot pass this.
  const std::uint64_t round_bound =
      clocked ? static_cast<std::uint64_t>(std::ceil(2.0 * t0 / (eps * eps))) + 2
              : setup.step_cap;

  Rng coin_rng(mix_seed({seed, kCoinStream}));
  Rng strategy_rng(mix_seed({seed, kStrategyStream}));

  GameTrajectory traj;
  traj.seed = seed;
  traj.epsilon = eps;
  traj.start = x0;

  Vec x = x0;
  std::uint64_t k = 0;
  if (record_full) traj.states.push_back(x);

  while (true) {
    const double t_k = clocked ? t0 - static_cast<double>(k) * dt
                               : std::numeric_limits<double>::quiet_NaN();
    // Clock exhaustion wins over a simultaneous space exit: the time-zero
    // payoff reads the initial condition everywhere, inside or out.
    if (clocked && t_k <= clock_tol) {
      traj.stopped_by_clock = true;
      traj.payoff_value = eval_payoff(*setup.payoff, domain, x, std::min(t_k, 0.0));
      traj.exit_time = 0.0;
      break;
    }
    if (!domain.inside(x)) {
      traj.payoff_value = clocked ? eval_payoff(*setup.payoff, domain, x, t_k)
                                  : eval_payoff(*setup.payoff, domain, x, 1.0);
      traj.exit_time = clocked ? t_k : 0.0;
      break;
    }
    if (k >= round_bound) {
      if (clocked) throw std::logic_error("game: round count exceeded the clock bound");
      traj.censored = true;
      traj.payoff_value = setup.payoff->g(x, 1.0);
      break;
    }

    StrategyContext ctx{x, t_k, static_cast<std::size_t>(k), &fs, &domain, &strategy_rng};
    std::vector<Vec> frame = minimizer(ctx);
    validate_frame(frame, dim, fs.j);
    Vec v = maximizer(ctx, frame);
    validate_direction(v, frame, dim);

    const bool heads = coin_rng.coin();
    const Vec x_next = heads ? x + eps * v : x - eps * v;
    const double delta = norm2(x_next - x0) - norm2(x - x0) - eps * eps;
    traj.drift_sum += delta;
    traj.drift_sq_sum += delta * delta;
    x = x_next;
    ++k;
    if (record_full) {
      traj.states.push_back(x);
      traj.coins.push_back(heads ? 1 : 0);
      traj.chosen_directions.push_back(v);
    }
  }

  traj.exit_state = x;
  traj.tau = static_cast<std::size_t>(k);
  return traj;
}

std::vector<GameTrajectory> run_games(const GameSetup& setup, const FrameRule& minimizer,
                                      const DirectionRule& maximizer, const Vec& x0, double t0,
                                      std::uint64_t base_seed, std::size_t count,
                                      bool record_full) {
  std::vector<GameTrajectory> out(count);
  parallel_for(count, [&](std::size_t i) {
    const std::uint64_t seed = mix_seed({base_seed, kTrajectoryStream, static_cast<std::uint64_t>(i)});
    out[i] = play(setup, minimizer, maximizer, x0, t0, seed, record_full);
  });
  return out;
}

ValueEstimate estimate_value(const std::vector<GameTrajectory>& trajectories) {
  ValueEstimate est;
  est.runs = trajectories.size();
  if (trajectories.empty()) return est;
  double sum = 0.0;
  for (const GameTrajectory& tr : trajectories) {
    sum += tr.payoff_value;
    if (tr.censored) ++est.censored;
  }
  est.mean = sum / static_cast<double>(est.runs);
  if (est.runs > 1) {
    double ss = 0.0;
    for (const GameTrajectory& tr : trajectories) {
      const double d = tr.payoff_value - est.mean;
      ss += d * d;
    }
    est.std_error = std::sqrt(ss / (static_cast<double>(est.runs) *
                                    static_cast<double>(est.runs - 1)));
    est.ci95 = 1.96 * est.std_error;
  }
  return est;
}

ValueEstimate estimate_value(const GameSetup& setup, const FrameRule& minimizer,
                             const DirectionRule& maximizer, const Vec& x0, double t0,
                             std::uint64_t base_seed, std::size_t count) {
  return estimate_value(run_games(setup, minimizer, maximizer, x0, t0, base_seed, count));
}

MartingaleReport martingale_diagnostics(const std::vector<GameTrajectory>& trajectories) {
  MartingaleReport rep;
  rep.runs = trajectories.size();
  if (rep.runs == 0) return rep;

  // Per trajectory, drift_sum telescopes to |x_tau - x_0|^2 - eps^2 tau.
  double gap_sum = 0.0, gap_sq = 0.0;
  double step_sum = 0.0, step_sq = 0.0;
  std::uint64_t steps = 0;
  for (const GameTrajectory& tr : trajectories) {
    gap_sum += tr.drift_sum;
    gap_sq += tr.drift_sum * tr.drift_sum;
    step_sum += tr.drift_sum;
    step_sq += tr.drift_sq_sum;
    steps += tr.tau;
  }
  const double n = static_cast<double>(rep.runs);
  rep.identity_gap_mean = gap_sum / n;
  if (rep.runs > 1) {
    const double var = std::max(0.0, (gap_sq - gap_sum * gap_sum / n) / (n - 1.0));
    rep.identity_gap_se = std::sqrt(var / n);
  }
  rep.identity_ok = rep.identity_gap_se > 0.0
                        ? std::abs(rep.identity_gap_mean) <= 4.0 * rep.identity_gap_se
                        : rep.identity_gap_mean == 0.0;

  if (steps > 1) {
    const double m = static_cast<double>(steps);
    rep.step_drift_mean = step_sum / m;
    const double var = std::max(0.0, (step_sq - step_sum * step_sum / m) / (m - 1.0));
    rep.step_drift_se = std::sqrt(var / m);
    rep.step_ok = rep.step_drift_se > 0.0 ? std::abs(rep.step_drift_mean) <= 4.0 * rep.step_drift_se
                                          : rep.step_drift_mean == 0.0;
  }
  return rep;
}

TailReport exit_tail(const std::vector<GameTrajectory>& trajectories, int bins) {
  TailReport rep;
  if (trajectories.empty() || bins < 2) return rep;

  std::vector<double> times;
  times.reserve(trajectories.size());
  double t_max = 0.0;
  double sum = 0.0;
  for (const GameTrajectory& tr : trajectories) {
    const double game_time = 0.5 * tr.epsilon * tr.epsilon * static_cast<double>(tr.tau);
    if (tr.censored) {
      // A censored run survived at least this long; keep it in the survival
      // counts but out of the mean.
      ++rep.censored;
    } else {
      sum += game_time;
    }
    times.push_back(game_time);
    t_max = std::max(t_max, game_time);
  }
  const std::size_t n = trajectories.size();
  const std::size_t uncensored = n - rep.censored;
  if (uncensored > 0) rep.mean_time = sum / static_cast<double>(uncensored);
  if (uncensored > 1) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (trajectories[i].censored) continue;
      const double d = times[i] - rep.mean_time;
      ss += d * d;
    }
    rep.mean_time_se = std::sqrt(ss / (static_cast<double>(uncensored) *
                                       static_cast<double>(uncensored - 1)));
  }

  if (t_max <= 0.0) return rep;
  std::sort(times.begin(), times.end());
  rep.t.resize(static_cast<std::size_t>(bins));
  rep.survival.resize(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    const double t = t_max * static_cast<double>(b) / static_cast<double>(bins);
    // Count of game times >= t, by binary search in the sorted list.
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    const std::size_t surviving = static_cast<std::size_t>(times.end() - it);
    rep.t[static_cast<std::size_t>(b)] = t;
    rep.survival[static_cast<std::size_t>(b)] = static_cast<double>(surviving) /
                                                static_cast<double>(n);
  }

  // Least-squares line through (t, log survival) over well-populated bins.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (int b = 0; b < bins; ++b) {
    const double s = rep.survival[static_cast<std::size_t>(b)];
    if (s * static_cast<double>(n) < 30.0) break;  // tail too thin from here on
    const double x = rep.t[static_cast<std::size_t>(b)];
    const double y = std::log(s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used >= 3) {
    const double m = static_cast<double>(used);
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
      rep.slope = (m * sxy - sx * sy) / denom;
      rep.intercept = (sy - rep.slope * sx) / m;
      rep.slope_valid = true;
    }
  }
  return rep;
}

ValueStrategyPair value_strategy_pair(const DppOperator& op,
                                      const std::vector<ValueSlice>& levels) {
  if (op.mode() != DppOperator::Mode::TimeDependent)
    throw std::invalid_argument("game: level-indexed strategies need a time-dependent operator");
  const double dt = 0.5 * op.epsilon() * op.epsilon();
  if (levels.empty()) throw std::invalid_argument("game: empty level stack");
  for (std::size_t k = 0; k < levels.size(); ++k)
    if (std::abs(levels[k].time - dt * static_cast<double>(k)) > 1e-9)
      throw std::invalid_argument("game: level " + std::to_string(k) + " sits at t = " +
                                  std::to_string(levels[k].time) +
                                  "; strategies need every level of the run (keep_every = 1)");

  auto slice_before = [&levels, dt](double t) -> const ValueSlice& {
    const double t_prev = t - dt;
    const long idx = std::lround(t_prev / dt);
    if (idx < 0 || idx >= static_cast<long>(levels.size()) ||
        std::abs(levels[static_cast<std::size_t>(idx)].time - t_prev) > 1e-9)
      throw std::out_of_range("game: no stored level at time " + std::to_string(t_prev) +
                              "; strategies need every level of the run");
    return levels[static_cast<std::size_t>(idx)];
  };

  ValueStrategyPair pair;
  pair.minimizer = [&op, slice_before](const StrategyContext& ctx) {
    const ValueSlice& prev = slice_before(ctx.t);
    const ScanChoice choice = op.scan(prev, ctx.x, prev.time);
    return op.frames().frames[choice.frame_index];
  };
  pair.maximizer = [&op, slice_before](const StrategyContext& ctx, const std::vector<Vec>& frame) {
    const ValueSlice& prev = slice_before(ctx.t);
    const FrameSet& fs = op.frames();
    double best = -std::numeric_limits<double>::infinity();
    Vec best_v;
    for (std::size_t s = 0; s < fs.sample_count(); ++s) {
      Vec v = Vec::zero(ctx.x.dim());
      for (int a = 0; a < fs.j; ++a) v += fs.sphere_half[s][a] * frame[static_cast<std::size_t>(a)];
      const double val = op.average(prev, ctx.x, v, prev.time);
      if (val > best) {
        best = val;
        best_v = v;
      }
    }
    return best_v;
  };
  return pair;
}

ValueStrategyPair value_strategy_pair(const DppOperator& op, const ValueSlice& fixed_point) {
  ValueStrategyPair pair;
  pair.minimizer = [&op, &fixed_point](const StrategyContext& ctx) {
    const ScanChoice choice = op.scan(fixed_point, ctx.x, fixed_point.time);
    return op.frames().frames[choice.frame_index];
  };
  pair.maximizer = [&op, &fixed_point](const StrategyContext& ctx, const std::vector<Vec>& frame) {
    const FrameSet& fs = op.frames();
    double best = -std::numeric_limits<double>::infinity();
    Vec best_v;
    for (std::size_t s = 0; s < fs.sample_count(); ++s) {
      Vec v = Vec::zero(ctx.x.dim());
      for (int a = 0; a < fs.j; ++a) v += fs.sphere_half[s][a] * frame[static_cast<std::size_t>(a)];
      const double val = op.average(fixed_point, ctx.x, v, fixed_point.time);
      if (val > best) {
        best = val;
        best_v = v;
      }
    }
    return best_v;
  };
  return pair;
}

FrameRule orthogonal_frame_rule(Vec center, int j) {
  return [center, j](const StrategyContext& ctx) {
    const int dim = ctx.x.dim();
    if (j > dim - 1)
      throw std::invalid_argument("game: no " + std::to_string(j) +
                                  "-frame orthogonal to a direction in dimension " +
                                  std::to_string(dim));
    Vec d = ctx.x - center;
    std::vector<Vec> basis;  // orthonormal, first entry spans d when present
    const double len = norm(d);
    if (len > 1e-12) basis.push_back((1.0 / len) * d);
    // Deterministic Gram-Schmidt extension by coordinate axes.
    for (int i = 0; i < dim && static_cast<int>(basis.size()) < dim; ++i) {
      Vec cand = Vec::axis(dim, i);
      for (const Vec& b : basis) cand -= dot(cand, b) * b;
      const double r = norm(cand);
      if (r > 1e-8) basis.push_back((1.0 / r) * cand);
    }
    if (static_cast<int>(basis.size()) != dim)
      throw std::logic_error("game: orthogonal frame construction failed");
    const std::size_t skip = len > 1e-12 ? 1 : 0;  // drop the radial direction
    std::vector<Vec> frame(basis.begin() + static_cast<std::ptrdiff_t>(skip),
                           basis.begin() + static_cast<std::ptrdiff_t>(skip) + j);
    return frame;
  };
}

FrameRule random_frame_rule() {
  return [](const StrategyContext& ctx) {
    const std::size_t i =
        static_cast<std::size_t>(ctx.rng->uniform_int(ctx.frames->frame_count()));
    return ctx.frames->frames[i];
  };
}

DirectionRule random_direction_rule() {
  return [](const StrategyContext& ctx, const std::vector<Vec>& frame) {
    const Vec s = ctx.rng->unit_vector(static_cast<int>(frame.size()));
    Vec v = Vec::zero(ctx.x.dim());
    for (std::size_t a = 0; a < frame.size(); ++a) v += s[static_cast<int>(a)] * frame[a];
    return v;
  };
}

DirectionRule first_vector_rule() {
  return [](const StrategyContext&, const std::vector<Vec>& frame) { return frame.front(); };
}

}  // namespace eigenflow
