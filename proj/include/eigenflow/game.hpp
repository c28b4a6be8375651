#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "eigenflow/dpp.hpp"
#include "eigenflow/frames.hpp"
#include "eigenflow/payoff.hpp"
#include "eigenflow/rng.hpp"

namespace eigenflow {

/// Everything a strategy may look at when choosing: current position, clock,
/// round number, the sampled frame set, the domain, and a private random
/// stream (independent of the coin stream, so randomized strategies do not
/// perturb the coin sequence).
struct StrategyContext {
  Vec x;
  double t = 0.0;       ///< NaN in stationary games
  std::size_t round = 0;
  const FrameSet* frames = nullptr;
  const Domain* domain = nullptr;
  Rng* rng = nullptr;
};

/// Minimizing player: returns a j-frame (orthonormal ambient vectors). It may
/// come from the frame set or be constructed on the fly; play() checks
/// orthonormality.
using FrameRule = std::function<std::vector<Vec>(const StrategyContext&)>;

/// Maximizing player: sees the minimizer's frame and returns an ambient unit
/// vector inside its span; play() checks both properties.
using DirectionRule = std::function<Vec(const StrategyContext&, const std::vector<Vec>&)>;

struct GameSetup {
  const Domain* domain = nullptr;
  const PayoffData* payoff = nullptr;
  const FrameSet* frames = nullptr;
  double epsilon = 0.1;
  DppOperator::Mode mode = DppOperator::Mode::TimeDependent;
  std::uint64_t step_cap = 10'000'000;  ///< stationary games only; hits are censored
};

/// One play of the game. Summary statistics are always present; states, coin
/// flips, and strategy choices are recorded only when requested.
struct GameTrajectory {
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  Vec start;
  Vec exit_state;
  double exit_time = 0.0;      ///< clock value at the stop, time-dependent games
  std::size_t tau = 0;         ///< number of rounds played
  double payoff_value = 0.0;
  bool stopped_by_clock = false;
  bool censored = false;       ///< stationary step cap reached

  /// Streaming sums of the per-round increments of |x_k - x_0|^2 - eps^2 k,
  /// which have conditional mean zero under fair coins.
  double drift_sum = 0.0;
  double drift_sq_sum = 0.0;

  // Populated when record_full is set.
  std::vector<Vec> states;
  std::vector<std::uint8_t> coins;
  std::vector<Vec> chosen_directions;
};

/// Runs one trajectory: each round the minimizer offers a frame, the maximizer
/// picks a unit direction in it, a fair coin moves the token eps along +/- the
/// direction, and the clock (when present) retreats by eps^2/2. The token
/// stops on leaving the domain or on clock exhaustion and scores the exit
/// payoff there.
GameTrajectory play(const GameSetup& setup, const FrameRule& minimizer,
                    const DirectionRule& maximizer, const Vec& x0, double t0,
                    std::uint64_t seed, bool record_full = false);

/// Independent trajectories with per-index seeds derived from base_seed;
/// results are ordered by index and independent of scheduling.
std::vector<GameTrajectory> run_games(const GameSetup& setup, const FrameRule& minimizer,
                                      const DirectionRule& maximizer, const Vec& x0, double t0,
                                      std::uint64_t base_seed, std::size_t count,
                                      bool record_full = false);

struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci95 = 0.0;
  std::size_t runs = 0;
  std::size_t censored = 0;
};

/// Sample mean / standard error / 95% half-width of the trajectory payoffs.
ValueEstimate estimate_value(const std::vector<GameTrajectory>& trajectories);

/// Convenience wrapper: run `count` games and summarize.
ValueEstimate estimate_value(const GameSetup& setup, const FrameRule& minimizer,
                             const DirectionRule& maximizer, const Vec& x0, double t0,
                             std::uint64_t base_seed, std::size_t count);

struct MartingaleReport {
  std::size_t runs = 0;
  double identity_gap_mean = 0.0;  ///< mean of |x_tau - x_0|^2 - eps^2 tau
  double identity_gap_se = 0.0;
  bool identity_ok = false;        ///< |mean| within 4 standard errors
  double step_drift_mean = 0.0;    ///< per-round increment mean, pooled
  double step_drift_se = 0.0;
  bool step_ok = false;
};

/// Optional-stopping diagnostics: the displacement identity
/// E|x_tau - x_0|^2 = eps^2 E[tau] and the per-round zero-drift check.
MartingaleReport martingale_diagnostics(const std::vector<GameTrajectory>& trajectories);

struct TailReport {
  std::vector<double> t;          ///< grid of game-time values eps^2 tau / 2
  std::vector<double> survival;   ///< empirical P[eps^2 tau / 2 >= t]
  double slope = 0.0;             ///< least-squares slope of log survival
  double intercept = 0.0;
  bool slope_valid = false;       ///< enough populated bins to fit
  double mean_time = 0.0;         ///< mean of eps^2 tau / 2
  double mean_time_se = 0.0;
  std::size_t censored = 0;
};

/// Exit-time tail behaviour on a uniform time grid of `bins` points; the log
/// survival fit uses only bins backed by at least 30 surviving samples.
TailReport exit_tail(const std::vector<GameTrajectory>& trajectories, int bins = 20);

/// Value-iteration strategies for time-dependent games: both players replay
/// the solver's min-max scan against the stored levels. `levels` must hold
/// every level 0..K of the run (keep_every = 1) and stay alive while playing.
struct ValueStrategyPair {
  FrameRule minimizer;
  DirectionRule maximizer;
};
ValueStrategyPair value_strategy_pair(const DppOperator& op,
                                      const std::vector<ValueSlice>& levels);

/// Stationary variant scanning against the fixed-point slice.
ValueStrategyPair value_strategy_pair(const DppOperator& op, const ValueSlice& fixed_point);

/// Minimizer that always offers a frame orthogonal to x - center (any frame
/// when x is at the center). Every move then grows |x - center|^2 by exactly
/// eps^2, which forces the space exit within (R^2 - |x0 - center|^2)/eps^2
/// rounds plus one.
FrameRule orthogonal_frame_rule(Vec center, int j);

/// Uniformly random frame from the sampled set / uniformly random direction.
FrameRule random_frame_rule();
DirectionRule random_direction_rule();

/// Maximizer that plays the first frame vector; deterministic.
DirectionRule first_vector_rule();

}  // namespace eigenflow
