#include "eigenflow/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eigenflow/frames.hpp"
#include "eigenflow/payoff.hpp"

namespace eigenflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------------------
// Decay fitting

DecayFit fit_decay_curve(std::vector<double> times, std::vector<double> gaps,
                         double noise_floor) {
  if (times.size() != gaps.size())
    throw std::invalid_argument("fit_decay_curve: times and gaps differ in length");
  if (!(noise_floor > 0.0))
    throw std::invalid_argument("fit_decay_curve: noise floor must be positive");

  DecayFit fit;
  fit.times = std::move(times);
  fit.gaps = std::move(gaps);

  // The usable window is the prefix still above the noise floor; past the
  // first sub-floor level the curve only reports solver noise.
  std::size_t window_end = 0;
  while (window_end < fit.gaps.size() && fit.gaps[window_end] > noise_floor) ++window_end;
  if (window_end == 0) {
    fit.already_converged = true;
    fit.note = "gap at or below the noise floor from the first level";
    return fit;
  }
  fit.fit_begin = window_end / 5;  // drop the initial transient
  fit.fit_end = window_end;
  const std::size_t count = fit.fit_end - fit.fit_begin;
  if (count < 10) {
    fit.note = "fewer than 10 levels above the noise floor after the transient";
    return fit;
  }

  double st = 0.0, sl = 0.0;
  for (std::size_t k = fit.fit_begin; k < fit.fit_end; ++k) {
    st += fit.times[k];
    sl += std::log(fit.gaps[k]);
  }
  const double mt = st / static_cast<double>(count);
  const double ml = sl / static_cast<double>(count);
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t k = fit.fit_begin; k < fit.fit_end; ++k) {
    const double dt = fit.times[k] - mt;
    const double dl = std::log(fit.gaps[k]) - ml;
    stt += dt * dt;
    stl += dt * dl;
    sll += dl * dl;
  }
  if (stt < 1e-30) {
    fit.note = "degenerate time window";
    return fit;
  }
  const double slope = stl / stt;
  fit.mu = -slope;
  fit.amplitude = std::exp(ml - slope * mt);
  if (sll < 1e-30) {
    fit.r_squared = 0.0;
    fit.note = "constant gaps";
    return fit;
  }
  double ss_res = 0.0;
  for (std::size_t k = fit.fit_begin; k < fit.fit_end; ++k) {
    const double pred = ml + slope * (fit.times[k] - mt);
    const double err = std::log(fit.gaps[k]) - pred;
    ss_res += err * err;
  }
  fit.r_squared = 1.0 - ss_res / sll;
  fit.valid = fit.r_squared >= 0.9;
  if (!fit.valid) fit.note = "log-linear fit residual too large";
  return fit;
}

DecayFit fit_decay(const std::vector<ValueSlice>& slices, const Grid& grid, const ValueSlice& z,
                   double noise_floor, const std::vector<std::size_t>& nodes) {
  if (slices.empty()) throw std::invalid_argument("fit_decay: no slices");
  if (nodes.empty()) throw std::invalid_argument("fit_decay: no nodes");
  (void)grid;
  std::vector<double> times, gaps;
  times.reserve(slices.size());
  gaps.reserve(slices.size());
  for (const ValueSlice& slice : slices) {
    double gap = 0.0;
    for (std::size_t id : nodes) {
      const double d = std::abs(slice.values[id] - z.values[id]);
      if (std::isnan(d)) throw std::invalid_argument("fit_decay: NaN at an examined node");
      gap = std::max(gap, d);
    }
    times.push_back(slice.time);
    gaps.push_back(gap);
  }
  return fit_decay_curve(std::move(times), std::move(gaps), noise_floor);
}

DecayFit fit_decay(const std::vector<ValueSlice>& slices, const Grid& grid, const ValueSlice& z,
                   double noise_floor) {
  return fit_decay(slices, grid, z, noise_floor, grid.interior_nodes());
}

// ---------------------------------------------------------------------------
// Principal eigenpair

EigenEstimate estimate_principal_eigenvalue(const Domain& domain, EigenMode mode,
                                            DppConfig config) {
  const int n = domain.dim();
  config.j = (mode == EigenMode::Largest) ? n : 1;
  config.validate(n);

  Grid grid(domain, config.h, config.epsilon);
  const FrameSet frames = generate_frames(n, config.j, config.resolution, config.seed);
  PayoffData payoff;
  payoff.g = [](const Vec&, double) { return 0.0; };
  payoff.u0 = [](const Vec&) { return 0.0; };
  DppOperator op(grid, payoff, frames, config.epsilon, DppOperator::Mode::Stationary);

  // A flat start is a fixed point of the sup-step until the boundary deficit
  // erodes inward, which stalls the rate at zero for ~1/eps^2 iterations. A
  // dome vanishing at the boundary skips that plateau.
  const double sign = (mode == EigenMode::Largest) ? 1.0 : -1.0;
  const Vec anchor = domain.anchor();
  const double radius = domain.enclosing_radius();
  ValueSlice cur;
  cur.time = 0.0;
  cur.epsilon = config.epsilon;
  cur.values.assign(grid.node_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t id : grid.interior_nodes())
    cur.values[id] =
        sign * std::max(0.0, 1.0 - norm2(grid.point(id) - anchor) / (radius * radius));
  for (std::size_t id : grid.boundary_layer_nodes()) cur.values[id] = 0.0;

  const double rate_scale = 2.0 / (config.epsilon * config.epsilon);
  const std::size_t cap = 3000;
  const std::size_t sustain_needed = 10;

  std::vector<double> mu_history;
  std::size_t sustained = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string note;
  for (std::size_t it = 0; it < cap && !converged; ++it) {
    ValueSlice next = op.step(cur, 0.0);
    iterations = it + 1;
    double factor = 0.0;
    for (std::size_t id : grid.interior_nodes())
      factor = std::max(factor, std::abs(next.values[id]));
    if (!(factor > 0.0)) {
      note = "profile collapsed to zero";
      cur = std::move(next);
      break;
    }
    const double mu = -rate_scale * std::log(factor);
    const double inv = 1.0 / factor;
    for (std::size_t id : grid.interior_nodes()) next.values[id] *= inv;
    for (std::size_t id : grid.boundary_layer_nodes()) next.values[id] *= inv;

    // Transient plateaus report a zero rate; only a settled positive rate
    // counts toward convergence.
    if (mu > 1e-12 && !mu_history.empty() &&
        std::abs(mu - mu_history.back()) <= 1e-4 * std::max(1.0, std::abs(mu)))
      ++sustained;
    else
      sustained = 0;
    mu_history.push_back(mu);
    cur = std::move(next);
    converged = sustained >= sustain_needed;
  }
  if (!converged && note.empty()) note = "per-step decay factor did not stabilize";

  EigenEstimate est{std::move(grid)};
  est.mu = mu_history.empty() ? 0.0 : mu_history.back();
  est.profile = std::move(cur);
  est.converged = converged;
  est.iterations = iterations;
  est.mu_history = std::move(mu_history);
  est.note = std::move(note);
  return est;
}

// ---------------------------------------------------------------------------
// Radial barrier

double radial_barrier_value(double r, double c, double s) {
  const double c1 = c * r / 2.0;
  const double c2 = 3.0 * c * r * r / 8.0;
  if (s <= r / 2.0) return c2 - 0.5 * c * s * s;
  return c1 * (r - s);
}

SymMatrix radial_barrier_hessian(int dim, double r, double c, const Vec& x) {
  if (x.dim() != dim) throw std::invalid_argument("radial_barrier_hessian: dimension mismatch");
  const double s = norm(x);
  if (s <= r / 2.0) {
    SymMatrix h(dim);
    for (int i = 0; i < dim; ++i) h.set(i, i, -c);
    return h;
  }
  // Radial profile f(s) = c1 (r - s): f'' = 0 along the radius, slope f'/s on
  // the tangent space, D^2 a = (f'/s)(I - d d^T).
  const double c1 = c * r / 2.0;
  const double tangential = -c1 / s;
  SymMatrix h(dim);
  for (int i = 0; i < dim; ++i) {
    const double di = x[i] / s;
    for (int k = i; k < dim; ++k) {
      const double dk = x[k] / s;
      const double id = (i == k) ? 1.0 : 0.0;
      h.set(i, k, tangential * (id - di * dk));
    }
  }
  return h;
}

BarrierReport verify_radial_barrier(double r, double c, const std::vector<Vec>& points) {
  if (!(r > 0.0) || !(c > 0.0))
    throw std::invalid_argument("verify_radial_barrier: need r > 0 and c > 0");
  if (points.empty()) throw std::invalid_argument("verify_radial_barrier: no sample points");

  BarrierReport rep;
  rep.dim = points[0].dim();
  rep.r = r;
  rep.c = c;
  rep.c1 = c * r / 2.0;
  rep.c2 = 3.0 * c * r * r / 8.0;

  const double half = r / 2.0;
  rep.value_continuity_gap =
      std::abs((rep.c2 - 0.5 * c * half * half) - rep.c1 * (r - half));
  rep.derivative_continuity_gap = std::abs(-c * half - (-rep.c1));
  rep.boundary_value_gap = std::abs(radial_barrier_value(r, c, r));

  for (const Vec& p : points) {
    if (p.dim() != rep.dim)
      throw std::invalid_argument("verify_radial_barrier: mixed sample dimensions");
    const double s = norm(p);
    const SymMatrix h = radial_barrier_hessian(rep.dim, r, c, p);
    const double lam_n = lambda_j(h, rep.dim);
    if (s <= half)
      rep.max_inside_residual = std::max(rep.max_inside_residual, std::abs(-lam_n - c));
    else
      rep.max_annulus_residual = std::max(rep.max_annulus_residual, std::abs(-lam_n));
  }
  rep.ok = rep.value_continuity_gap <= 1e-12 && rep.derivative_continuity_gap <= 1e-12 &&
           rep.boundary_value_gap <= 1e-12 && rep.max_inside_residual <= 1e-12 &&
           rep.max_annulus_residual <= 1e-12;
  return rep;
}

std::vector<Vec> barrier_sample_points(int dim, double r) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("barrier_sample_points: unsupported dimension");
  const double fractions[] = {0.1, 0.3, 0.45, 0.55, 0.75, 0.9, 0.999};
  std::vector<Vec> dirs;
  for (int a = 0; a < dim; ++a) dirs.push_back(Vec::axis(dim, a));
  Vec diag = Vec::zero(dim);
  for (int a = 0; a < dim; ++a) diag[a] = 1.0 / std::sqrt(static_cast<double>(dim));
  dirs.push_back(diag);

  std::vector<Vec> points;
  points.push_back(Vec::zero(dim));
  for (const Vec& d : dirs)
    for (double f : fractions) points.push_back((f * r) * d);
  return points;
}

// ---------------------------------------------------------------------------
// Coincidence detection

namespace {

/// side: -1 tests u <= z + tol, +1 tests u >= z - tol, 0 both.
CoincidenceReport coincidence_over_nodes(const std::vector<ValueSlice>& slices, const Grid& grid,
                                         const ValueSlice& z, double tol, int side,
                                         std::vector<std::size_t> nodes) {
  if (slices.empty()) throw std::invalid_argument("detect_coincidence: no slices");
  if (!(tol > 0.0)) throw std::invalid_argument("detect_coincidence: tolerance must be positive");
  (void)grid;

  CoincidenceReport rep;
  rep.tol = tol;
  rep.horizon = slices.back().time;
  rep.nodes = std::move(nodes);
  rep.t_star.assign(rep.nodes.size(), 0.0);

  const std::size_t levels = slices.size();
  for (std::size_t i = 0; i < rep.nodes.size(); ++i) {
    const std::size_t id = rep.nodes[i];
    const double zv = z.values[id];
    if (std::isnan(zv))
      throw std::invalid_argument("detect_coincidence: stationary value missing at a node");
    // Last violating level decides t*: the node coincides from the next
    // stored level on. Violation at the final level means censored.
    std::size_t k = levels;
    while (k > 0) {
      const double diff = slices[k - 1].values[id] - zv;
      const bool viol = (side <= 0 && diff > tol) || (side >= 0 && -diff > tol);
      if (viol) break;
      --k;
    }
    if (k == levels) {
      rep.t_star[i] = kInf;
      ++rep.censored_nodes;
    } else if (k == 0) {
      rep.t_star[i] = slices.front().time;
    } else {
      rep.t_star[i] = slices[k].time;
    }
  }
  rep.censored = rep.censored_nodes > 0;
  rep.global_t = 0.0;
  for (double t : rep.t_star) rep.global_t = std::max(rep.global_t, t);
  return rep;
}

}  // namespace

CoincidenceReport detect_coincidence(const std::vector<ValueSlice>& slices, const Grid& grid,
                                     const ValueSlice& z, double tol) {
  return coincidence_over_nodes(slices, grid, z, tol, 0, grid.interior_nodes());
}

CoincidenceReport one_sided_coincidence(const std::vector<ValueSlice>& slices, const Grid& grid,
                                        const ValueSlice& z, double tol, Side side) {
  return coincidence_over_nodes(slices, grid, z, tol, side == Side::Below ? -1 : 1,
                                grid.interior_nodes());
}

// ---------------------------------------------------------------------------
// Half-space coincidence

HalfspaceReport halfspace_coincidence(const std::vector<ValueSlice>& slices, const Grid& grid,
                                      const ValueSlice& z, double tol, Side side, const Vec& w,
                                      double theta, int buckets) {
  if (buckets < 1) throw std::invalid_argument("halfspace_coincidence: need at least one bucket");
  const double wn = norm(w);
  if (!(wn > 1e-12)) throw std::invalid_argument("halfspace_coincidence: direction is zero");
  Vec unit = (1.0 / wn) * w;

  std::vector<std::size_t> nodes;
  std::vector<double> dist;
  for (std::size_t id : grid.interior_nodes()) {
    const double s = dot(grid.point(id), unit) - theta;
    if (s > 0.0) {
      nodes.push_back(id);
      dist.push_back(s);
    }
  }
  if (nodes.empty())
    throw std::invalid_argument("halfspace_coincidence: no interior nodes past the hyperplane");

  HalfspaceReport rep{coincidence_over_nodes(slices, grid, z, tol, side == Side::Below ? -1 : 1,
                                             std::move(nodes)),
                      unit, theta};

  const double s_max = *std::max_element(dist.begin(), dist.end());
  const double width = s_max / buckets;
  rep.buckets.assign(static_cast<std::size_t>(buckets), HalfspaceBucket{});
  for (int b = 0; b < buckets; ++b) {
    rep.buckets[static_cast<std::size_t>(b)].s_lo = width * b;
    rep.buckets[static_cast<std::size_t>(b)].s_hi = width * (b + 1);
  }
  for (std::size_t i = 0; i < rep.base.nodes.size(); ++i) {
    int b = std::min(buckets - 1, static_cast<int>(dist[i] / width));
    HalfspaceBucket& bucket = rep.buckets[static_cast<std::size_t>(b)];
    ++bucket.nodes;
    if (rep.base.t_star[i] == kInf)
      ++bucket.censored;
    bucket.max_t_star = std::max(bucket.max_t_star, rep.base.t_star[i]);
  }

  // Waiting times should not grow away from the hyperplane; allow one stored
  // level of jitter.
  const double jitter =
      slices.size() >= 2 ? slices[1].time - slices[0].time : 0.0;
  double prev = kInf;
  bool have_prev = false;
  for (const HalfspaceBucket& bucket : rep.buckets) {
    if (bucket.nodes == 0) continue;
    if (have_prev && bucket.max_t_star > prev + jitter) ++rep.monotonicity_violations;
    prev = bucket.max_t_star;
    have_prev = true;
  }
  return rep;
}

HalfspaceReport halfspace_scenario(const Domain& domain, const Affine& pi, const Vec& w,
                                   double theta, const DppConfig& config, double tol) {
  const int n = domain.dim();
  if (pi.gradient.dim() != n || w.dim() != n)
    throw std::invalid_argument("halfspace_scenario: dimension mismatch");
  if (config.j != 1 && config.j != n)
    throw std::invalid_argument(
        "halfspace_scenario: one-sided coincidence needs j = 1 or j = N");
  const double wn = norm(w);
  if (!(wn > 1e-12)) throw std::invalid_argument("halfspace_scenario: direction is zero");
  const Vec unit = (1.0 / wn) * w;
  const double th = theta / wn;  // same hyperplane against the unit normal

  const Side side = (config.j == 1) ? Side::Below : Side::Above;
  const double sign = (side == Side::Below) ? 1.0 : -1.0;
  const Vec anchor = domain.anchor();
  // The bump must vanish on the boundary strip or the initial datum would
  // disagree with g there, so it is supported on the inscribed ball.
  const double radius = domain.inscribed_radius();

  auto boundary = [pi, unit, th, sign](const Vec& x, double) {
    return pi(x) + sign * std::max(0.0, th - dot(x, unit));
  };
  PayoffData payoff;
  payoff.g = boundary;
  payoff.u0 = [boundary, anchor, radius, sign](const Vec& x) {
    return boundary(x, 0.0) + sign * std::max(0.0, radius * radius - norm2(x - anchor));
  };

  const ParabolicResult run = solve_parabolic(domain, payoff, config);

  ValueSlice z;
  z.time = 0.0;
  z.epsilon = config.epsilon;
  z.values.assign(run.grid.node_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t id : run.grid.interior_nodes()) z.values[id] = pi(run.grid.point(id));

  const double use_tol = tol > 0.0 ? tol : std::max(0.02, 3.0 * config.epsilon);
  return halfspace_coincidence(run.slices, run.grid, z, use_tol, side, unit, th);
}

// ---------------------------------------------------------------------------
// Exponential sandwich

SandwichReport sandwich_check(const std::vector<ValueSlice>& slices, const Grid& grid,
                              const ValueSlice& z, const EigenEstimate& enclosing,
                              std::size_t fit_level, double slack) {
  if (fit_level + 1 >= slices.size())
    throw std::invalid_argument("sandwich_check: need levels after the fitting level");
  if (!(slack > 0.0)) throw std::invalid_argument("sandwich_check: slack must be positive");

  SandwichReport rep;
  rep.mu = enclosing.mu;
  rep.fit_level = fit_level;

  const auto& nodes = grid.interior_nodes();
  std::vector<double> psi(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    psi[i] = interpolate(enclosing.profile, enclosing.grid, grid.point(nodes[i]));
    if (!(psi[i] > 1e-9))
      throw std::invalid_argument(
          "sandwich_check: enclosing profile not positive at a checked node");
  }

  const double t0 = slices[fit_level].time;
  const double decay0 = std::exp(-rep.mu * t0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double diff = slices[fit_level].values[nodes[i]] - z.values[nodes[i]];
    const double scale = psi[i] * decay0;
    rep.c_upper = std::max(rep.c_upper, std::max(0.0, diff) / scale);
    rep.c_lower = std::max(rep.c_lower, std::max(0.0, -diff) / scale);
  }

  for (std::size_t k = fit_level + 1; k < slices.size(); ++k) {
    const double decay = std::exp(-rep.mu * slices[k].time);
    ++rep.checked_levels;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double diff = slices[k].values[nodes[i]] - z.values[nodes[i]];
      const double up = rep.c_upper * psi[i] * decay + slack;
      const double dn = -(rep.c_lower * psi[i] * decay + slack);
      if (diff > up) {
        ++rep.violations;
        rep.max_overshoot = std::max(rep.max_overshoot, diff - up);
      } else if (diff < dn) {
        ++rep.violations;
        rep.max_overshoot = std::max(rep.max_overshoot, dn - diff);
      }
    }
  }
  rep.ok = rep.violations == 0;
  return rep;
}

}  // namespace eigenflow
