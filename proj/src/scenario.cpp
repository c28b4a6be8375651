#include "eigenflow/scenario.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "eigenflow/asymptotics.hpp"
#include "eigenflow/dpp.hpp"
#include "eigenflow/envelope.hpp"
#include "eigenflow/fdiff.hpp"
#include "eigenflow/frames.hpp"
#include "eigenflow/game.hpp"
#include "eigenflow/parallel.hpp"
#include "eigenflow/rng.hpp"

namespace eigenflow {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char kVersion[] = "0.1.0";

// ---------------------------------------------------------------------------
// Config plumbing.

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_line(int lineno, const std::string& what) {
  throw ConfigError("config line " + std::to_string(lineno) + ": " + what);
}

/// Reads the [solver] section over the scenario's defaults and validates for
/// the given dimension. Validation failures surface as ConfigError so the
/// runner can report them as configuration problems, not solver crashes.
DppConfig read_solver(const ConfigFile& f, DppConfig c, int dim) {
  c.epsilon = f.get_double("solver.epsilon", c.epsilon);
  c.h = f.get_double("solver.h", c.h);
  c.j = f.get_int("solver.j", c.j);
  c.horizon = f.get_double("solver.horizon", c.horizon);
  c.resolution = f.get_int("solver.resolution", c.resolution);
  c.fixed_point_tol = f.get_double("solver.fixed_point_tol", c.fixed_point_tol);
  c.max_sweeps = f.get_int("solver.max_sweeps", c.max_sweeps);
  c.keep_every = f.get_int("solver.keep_every", c.keep_every);
  try {
    c.validate(dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

void require_all_read(const ConfigFile& f) {
  const auto leftover = f.untouched_keys();
  if (leftover.empty()) return;
  std::string msg = "unknown config key";
  if (leftover.size() > 1) msg += "s";
  msg += ": ";
  for (std::size_t i = 0; i < leftover.size(); ++i) {
    if (i) msg += ", ";
    msg += leftover[i];
  }
  throw ConfigError(msg);
}

json solver_json(const DppConfig& c) {
  return json{{"epsilon", c.epsilon},
              {"h", c.h},
              {"j", c.j},
              {"horizon", c.horizon},
              {"resolution", c.resolution},
              {"fixed_point_tol", c.fixed_point_tol},
              {"max_sweeps", c.max_sweeps},
              {"keep_every", c.keep_every}};
}

// ---------------------------------------------------------------------------
// Checks.

struct CheckSet {
  std::vector<CheckResult> items;

  void le(const std::string& name, double measured, double threshold, std::string detail = "") {
    items.push_back({name, measured <= threshold, measured, threshold, std::move(detail)});
  }
  void ge(const std::string& name, double measured, double threshold, std::string detail = "") {
    items.push_back({name, measured >= threshold, measured, threshold, std::move(detail)});
  }
  void flag(const std::string& name, bool ok, std::string detail = "") {
    items.push_back({name, ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)});
  }
};

/// Thrown when a solver fails to converge or a result is structurally
/// unusable; the runner maps it to exit code 3.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Ctx {
  const ConfigFile& cfg;
  std::string out;
  std::uint64_t seed = 1;
  int levels = 0;  ///< requested field exports; 0 = scenario default
};

struct Outcome {
  CheckSet checks;
  json config;
};

// ---------------------------------------------------------------------------
// Artifact writers. All numeric output goes through %.17g so a rerun with the
// same inputs is byte-identical.

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

/// Interior and strip nodes as coordinate columns plus the value.
void write_field_csv(const std::string& path, const Grid& grid, const ValueSlice& slice) {
  std::ostringstream os;
  const int n = grid.dim();
  for (int a = 0; a < n; ++a) os << (a ? "," : "") << "x" << (a + 1);
  os << ",value\n";
  for (std::size_t id = 0; id < grid.node_count(); ++id) {
    if (grid.classify(id) == NodeClass::Far) continue;
    const Vec x = grid.point(id);
    for (int a = 0; a < n; ++a) os << (a ? "," : "") << fmt17(x[a]);
    os << "," << fmt17(slice.values[id]) << "\n";
  }
  write_file(path, os.str());
}

void write_curve_csv(const std::string& path, const std::string& h1, const std::string& h2,
                     const std::vector<double>& a, const std::vector<double>& b) {
  std::ostringstream os;
  os << h1 << "," << h2 << "\n";
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    os << fmt17(a[i]) << "," << fmt17(b[i]) << "\n";
  write_file(path, os.str());
}

std::vector<std::size_t> pick_levels(std::size_t total, int want) {
  std::vector<std::size_t> out;
  if (total == 0) return out;
  const std::size_t w = std::min<std::size_t>(total, std::max(want, total > 1 ? 2 : 1));
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t idx =
        w == 1 ? 0 : static_cast<std::size_t>(std::llround(double(i) * double(total - 1) / double(w - 1)));
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

void export_fields(const Ctx& ctx, const Grid& grid, const std::vector<ValueSlice>& slices,
                   int default_count) {
  const int want = ctx.levels > 0 ? ctx.levels : default_count;
  for (std::size_t idx : pick_levels(slices.size(), want)) {
    char name[32];
    std::snprintf(name, sizeof name, "field_t%04zu.csv", idx);
    write_field_csv(ctx.out + "/" + name, grid, slices[idx]);
  }
}

// ---------------------------------------------------------------------------
// Shared numeric helpers.

ValueSlice profile_slice(const Grid& grid, const std::function<double(const Vec&)>& f,
                         double time = 0.0) {
  ValueSlice s;
  s.time = time;
  s.values.assign(grid.node_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t id = 0; id < grid.node_count(); ++id)
    if (grid.carries_value(id)) s.values[id] = f(grid.point(id));
  return s;
}

std::size_t node_at(const Grid& grid, const Vec& p) {
  for (std::size_t id : grid.interior_nodes())
    if (norm(grid.point(id) - p) < 0.25 * grid.spacing()) return id;
  throw SolverFailure("no interior node at " + p.str());
}

double sup_gap(const ValueSlice& u, const ValueSlice& z, const std::vector<std::size_t>& nodes) {
  double m = 0.0;
  for (std::size_t id : nodes) m = std::max(m, std::abs(u.values[id] - z.values[id]));
  return m;
}

/// Counts increases of the gap curve while it is still above the noise floor.
int monotone_violations(const std::vector<double>& gaps, double floor) {
  int v = 0;
  for (std::size_t k = 0; k + 1 < gaps.size(); ++k) {
    if (gaps[k] <= floor) break;
    if (gaps[k + 1] > gaps[k] * (1.0 + 1e-12) + 1e-12) ++v;
  }
  return v;
}

std::size_t level_at_or_after(const std::vector<ValueSlice>& slices, double t) {
  for (std::size_t k = 0; k < slices.size(); ++k)
    if (slices[k].time >= t - 1e-12) return k;
  return slices.empty() ? 0 : slices.size() - 1;
}

std::size_t nearest_level(const std::vector<ValueSlice>& slices, double t) {
  std::size_t best = 0;
  double gap = kInf;
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const double d = std::abs(slices[k].time - t);
    if (d < gap) {
      gap = d;
      best = k;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// heat1d: the interval (0, 1) with zero boundary data and a clipped sine
// initial profile, cross-checked against the separated solution, the decay
// rate pi^2, and the finite-difference route.

Outcome scenario_heat1d(Ctx& ctx) {
  DppConfig defs;
  defs.epsilon = 0.05;
  defs.h = 0.025;
  defs.j = 1;
  defs.horizon = 1.2;
  defs.resolution = 16;
  DppConfig cfg = read_solver(ctx.cfg, defs, 1);
  require_all_read(ctx.cfg);
  cfg.seed = ctx.seed;

  const Domain dom = Domain::ball(Vec{0.5}, 0.5);
  PayoffData data;
  data.g = [](const Vec&, double) { return 0.0; };
  data.u0 = [](const Vec& x) { return std::max(0.0, std::sin(kPi * x[0])); };

  ParabolicResult run = solve_parabolic(dom, data, cfg);
  const ValueSlice z = profile_slice(run.grid, [](const Vec&) { return 0.0; });

  Outcome out;
  out.config = json{{"solver", solver_json(cfg)}, {"domain", "ball"}, {"dim", 1}};

  // Separated solution at the stored level closest to t = 0.5.
  const std::size_t mid = nearest_level(run.slices, 0.5);
  const double tm = run.slices[mid].time;
  double fourier = 0.0;
  for (std::size_t id : run.grid.interior_nodes()) {
    const double x = run.grid.point(id)[0];
    const double exact = std::exp(-kPi * kPi * tm) * std::sin(kPi * x);
    fourier = std::max(fourier, std::abs(run.slices[mid].values[id] - exact));
  }
  out.checks.le("fourier-sup-gap", fourier, std::max(0.05, 5.0 * cfg.epsilon),
                "t = " + fmt17(tm));

  const double floor = 10.0 * cfg.fixed_point_tol;
  const DecayFit fit = fit_decay(run.slices, run.grid, z, floor);
  out.checks.flag("decay-fit-valid", fit.valid, fit.note);
  out.checks.le("decay-rate", std::abs(fit.mu - kPi * kPi) / (kPi * kPi), 0.15,
                "mu = " + fmt17(fit.mu));
  out.checks.le("monotone-gaps", monotone_violations(fit.gaps, floor), 0.0);

  // Same data through the finite-difference marcher, compared at t = 0.5.
  FdConfig fd;
  fd.h = cfg.h;
  fd.horizon = 0.5;
  fd.j = cfg.j;
  try {
    fd.validate(1);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  FdResult fdrun = solve_fd(dom, data, fd);
  const ValueSlice& fslice = fdrun.slices[nearest_level(fdrun.slices, tm)];
  double route = 0.0;
  for (std::size_t id : run.grid.interior_nodes()) {
    const double v = interpolate(fslice, fdrun.grid, run.grid.point(id));
    route = std::max(route, std::abs(run.slices[mid].values[id] - v));
  }
  out.checks.le("route-gap", route, 0.01);

  write_curve_csv(ctx.out + "/decay.csv", "t", "sup_gap", fit.times, fit.gaps);
  export_fields(ctx, run.grid, run.slices, 3);
  return out;
}

// ---------------------------------------------------------------------------
// matrix-props: direct checks of the eigenvalue toolbox on random matrices.

Outcome scenario_matrix_props(Ctx& ctx) {
  const int pairs = ctx.cfg.get_int("data.pairs", 1000);
  const int cf_cases = ctx.cfg.get_int("data.cf_cases", 20);
  const int cf_res = ctx.cfg.get_int("data.cf_resolution", 400);
  require_all_read(ctx.cfg);
  if (pairs < 1 || cf_cases < 1) throw ConfigError("data.pairs and data.cf_cases must be positive");
  if (cf_res < 4 || cf_res % 4 != 0)
    throw ConfigError("data.cf_resolution must be a positive multiple of 4");

  Outcome out;
  out.config = json{{"data", {{"pairs", pairs}, {"cf_cases", cf_cases}, {"cf_resolution", cf_res}}}};

  Rng rng(mix_seed({ctx.seed, 0x6d617472u}));
  double weyl = 0.0, duality = 0.0, residual = 0.0, ortho = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const int n = 2 + k % 5;
    const SymMatrix a = SymMatrix::random(n, rng);
    const SymMatrix b = SymMatrix::random(n, rng);
    const Vec la = eigenvalues_sym(a);
    const Vec lb = eigenvalues_sym(b);
    const Vec lc = eigenvalues_sym(a + b);
    for (int j = 0; j < n; ++j) {
      weyl = std::max(weyl, la[0] + lb[j] - lc[j]);
      weyl = std::max(weyl, lc[j] - (la[n - 1] + lb[j]));
    }
    const Vec ln = eigenvalues_sym(-a);
    const double scale = std::max(1.0, a.frobenius());
    for (int j = 0; j < n; ++j)
      duality = std::max(duality, std::abs(la[j] + ln[n - 1 - j]) / scale);
    const EigenDecomposition ed = eigen_sym(a);
    for (int i = 0; i < n; ++i) {
      residual = std::max(residual, norm(a.apply(ed.vectors[i]) - ed.values[i] * ed.vectors[i]) / scale);
      for (int j = 0; j <= i; ++j)
        ortho = std::max(ortho, std::abs(dot(ed.vectors[i], ed.vectors[j]) - (i == j ? 1.0 : 0.0)));
    }
  }
  out.checks.le("weyl-gap", weyl, 1e-9, std::to_string(pairs) + " pairs, dims 2..6");
  out.checks.le("duality-gap", duality, 1e-12);
  out.checks.le("jacobi-residual", residual, 1e-10);
  out.checks.le("jacobi-orthonormal", ortho, 1e-12);

  // Sampled Courant-Fischer on the plane: exact on diagonal matrices when the
  // direction grid contains both axes, and within the angular sampling error
  // in general.
  const FrameSet f1 = generate_frames(2, 1, cf_res, mix_seed({ctx.seed, 1}));
  const FrameSet f2 = generate_frames(2, 2, cf_res, mix_seed({ctx.seed, 2}));
  double diag_gap = 0.0, sampled_gap = 0.0;
  for (int k = 0; k < cf_cases; ++k) {
    Vec d(2);
    d[0] = 4.0 * rng.uniform01() - 2.0;
    d[1] = 4.0 * rng.uniform01() - 2.0;
    const SymMatrix m = SymMatrix::diagonal(d);
    const double lo = std::min(d[0], d[1]), hi = std::max(d[0], d[1]);
    const double scale = std::max(1.0, m.max_abs());
    diag_gap = std::max(diag_gap, std::abs(courant_fischer(m, 1, f1) - lo) / scale);
    diag_gap = std::max(diag_gap, std::abs(courant_fischer(m, 2, f2) - hi) / scale);

    const SymMatrix g = SymMatrix::random(2, rng);
    const Vec lg = eigenvalues_sym(g);
    const double gs = std::max(1.0, g.max_abs());
    sampled_gap = std::max(sampled_gap, std::abs(courant_fischer(g, 1, f1) - lg[0]) / gs);
    sampled_gap = std::max(sampled_gap, std::abs(courant_fischer(g, 2, f2) - lg[1]) / gs);
  }
  out.checks.le("cf-diagonal", diag_gap, 1e-12);
  out.checks.le("cf-sampled", sampled_gap, 0.01);
  return out;
}

// ---------------------------------------------------------------------------
// disk-envelope: stationary j = 1 / j = 2 profiles on the unit disk against
// the convex and concave envelopes of g(x) = x1^2 - x2^2.

Outcome scenario_disk_envelope(Ctx& ctx) {
  DppConfig defs;
  defs.epsilon = 0.1;
  defs.h = 0.05;
  defs.j = 1;
  defs.resolution = 90;
  DppConfig cfg = read_solver(ctx.cfg, defs, 2);
  const double spacing = ctx.cfg.get_double("data.envelope_spacing", cfg.h);
  require_all_read(ctx.cfg);
  if (!(spacing > 0)) throw ConfigError("data.envelope_spacing must be positive");
  cfg.seed = ctx.seed;

  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const auto g = [](const Vec& x) { return x[0] * x[0] - x[1] * x[1]; };

  EllipticResult lo = solve_elliptic(dom, g, cfg, -1.0);
  DppConfig cfg2 = cfg;
  cfg2.j = 2;
  EllipticResult hi = solve_elliptic(dom, g, cfg2, 1.0);
  if (!lo.converged || !hi.converged)
    throw SolverFailure("stationary sweep did not converge within max_sweeps");

  const auto samples = sample_boundary(dom, g, spacing);
  EnvelopeStats stats_lo, stats_hi;
  ValueSlice env = convex_envelope(dom, samples, lo.grid, &stats_lo);
  ValueSlice cenv = concave_envelope(dom, samples, hi.grid, &stats_hi);

  Outcome out;
  out.config = json{{"solver", solver_json(cfg)},
                    {"data", {{"envelope_spacing", spacing}, {"boundary_samples", samples.size()}}}};

  const double gate = std::max(0.05, 5.0 * cfg.epsilon);
  double dlo = 0.0, dhi = 0.0, exact_lo = 0.0, exact_hi = 0.0;
  for (std::size_t id : lo.grid.interior_nodes()) {
    const Vec x = lo.grid.point(id);
    dlo = std::max(dlo, std::abs(lo.value.values[id] - env.values[id]));
    dhi = std::max(dhi, std::abs(hi.value.values[id] - cenv.values[id]));
    exact_lo = std::max(exact_lo, std::abs(env.values[id] - (2.0 * x[0] * x[0] - 1.0)));
    exact_hi = std::max(exact_hi, std::abs(cenv.values[id] - (1.0 - 2.0 * x[1] * x[1])));
  }
  out.checks.le("stationary-vs-envelope-j1", dlo, gate);
  out.checks.le("stationary-vs-envelope-j2", dhi, gate);
  out.checks.le("envelope-vs-exact-j1", exact_lo, 0.05,
                std::to_string(stats_lo.relaxed_nodes) + " relaxed nodes");
  out.checks.le("envelope-vs-exact-j2", exact_hi, 0.05,
                std::to_string(stats_hi.relaxed_nodes) + " relaxed nodes");
  const std::size_t origin = node_at(lo.grid, Vec{0.0, 0.0});
  out.checks.le("origin-value", std::abs(env.values[origin] + 1.0), 0.02);

  // Backfill the exterior strip with g so the exported envelope fields carry
  // the boundary datum alongside the interior values.
  for (std::size_t id : lo.grid.strip_nodes()) {
    env.values[id] = g(lo.grid.point(id));
    cenv.values[id] = g(lo.grid.point(id));
  }
  write_field_csv(ctx.out + "/stationary_j1.csv", lo.grid, lo.value);
  write_field_csv(ctx.out + "/stationary_j2.csv", hi.grid, hi.value);
  write_field_csv(ctx.out + "/envelope_j1.csv", lo.grid, env);
  write_field_csv(ctx.out + "/envelope_j2.csv", hi.grid, cenv);
  return out;
}

// ---------------------------------------------------------------------------
// eigen-decay: three initial profiles on the unit disk relax at a common
// exponential rate matching the principal eigenvalue estimate.

Outcome scenario_eigen_decay(Ctx& ctx) {
  DppConfig defs;
  defs.epsilon = 0.1;
  defs.h = 0.0625;
  defs.j = 1;
  defs.horizon = 2.5;
  defs.resolution = 45;
  DppConfig cfg = read_solver(ctx.cfg, defs, 2);
  require_all_read(ctx.cfg);
  cfg.seed = ctx.seed;

  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  struct Profile {
    const char* name;
    std::function<double(const Vec&)> u0;
  };
  const Profile profiles[] = {
      {"paraboloid", [](const Vec& x) { return -std::max(0.0, 1.0 - norm2(x)); }},
      {"quartic",
       [](const Vec& x) {
         const double b = std::max(0.0, 1.0 - norm2(x));
         return -b * b;
       }},
      {"cosine", [](const Vec& x) { return -std::max(0.0, std::cos(0.5 * kPi * norm(x))); }},
  };

  Outcome out;
  out.config = json{{"solver", solver_json(cfg)}, {"domain", "unit disk"}};

  const double floor = 1e-5;
  std::vector<DecayFit> fits;
  std::vector<ParabolicResult> runs;
  for (const Profile& p : profiles) {
    PayoffData data;
    data.g = [](const Vec&, double) { return 0.0; };
    data.u0 = p.u0;
    runs.push_back(solve_parabolic(dom, data, cfg));
    const ValueSlice z = profile_slice(runs.back().grid, [](const Vec&) { return 0.0; });
    fits.push_back(fit_decay(runs.back().slices, runs.back().grid, z, floor));
    const DecayFit& fit = fits.back();
    CheckResult c;
    c.name = std::string("fit-") + p.name;
    c.passed = fit.valid && fit.mu > 0.0;
    c.measured = fit.r_squared;
    c.threshold = 0.9;
    c.detail = "mu = " + fmt17(fit.mu);
    out.checks.items.push_back(c);
  }

  double spread = 0.0;
  for (std::size_t a = 0; a < fits.size(); ++a)
    for (std::size_t b = a + 1; b < fits.size(); ++b)
      spread = std::max(spread, std::abs(fits[a].mu - fits[b].mu) /
                                    std::max(1e-12, std::min(fits[a].mu, fits[b].mu)));
  out.checks.le("pairwise-rate-spread", spread, 0.2);

  EigenEstimate eig = estimate_principal_eigenvalue(dom, EigenMode::Largest, cfg);
  if (!eig.converged) throw SolverFailure("eigenvalue iteration did not settle: " + eig.note);
  double vs = 0.0;
  for (const DecayFit& f : fits) vs = std::max(vs, std::abs(f.mu - eig.mu) / eig.mu);
  out.checks.le("rates-vs-eigenvalue", vs, 0.2, "mu_hat = " + fmt17(eig.mu));
  const double ball_rate = kPi * kPi / 4.0;
  out.checks.le("eigenvalue-vs-ball-rate", std::abs(eig.mu - ball_rate) / ball_rate, 0.2);

  // Two-sided envelope against the enclosing-ball eigenpair.
  const Domain enc_dom = Domain::ball(Vec{0.0, 0.0}, 1.25);
  EigenEstimate enc = estimate_principal_eigenvalue(enc_dom, EigenMode::Largest, cfg);
  if (!enc.converged) throw SolverFailure("enclosing-ball eigen iteration did not settle");
  std::size_t violations = 0;
  double worst = 0.0;
  for (const ParabolicResult& run : runs) {
    const ValueSlice z = profile_slice(run.grid, [](const Vec&) { return 0.0; });
    const std::size_t fit_level = level_at_or_after(run.slices, 0.3);
    const SandwichReport sw = sandwich_check(run.slices, run.grid, z, enc, fit_level, 5e-3);
    violations += sw.violations;
    worst = std::max(worst, sw.max_overshoot);
  }
  out.checks.le("sandwich-violations", double(violations), 0.0, "overshoot " + fmt17(worst));

  int mono = 0;
  for (const DecayFit& f : fits) mono += monotone_violations(f.gaps, floor);
  out.checks.le("monotone-gaps", mono, 0.0);

  write_curve_csv(ctx.out + "/decay.csv", "t", "sup_gap", fits[0].times, fits[0].gaps);
  write_curve_csv(ctx.out + "/decay_quartic.csv", "t", "sup_gap", fits[1].times, fits[1].gaps);
  write_curve_csv(ctx.out + "/decay_cosine.csv", "t", "sup_gap", fits[2].times, fits[2].gaps);
  write_field_csv(ctx.out + "/profile.csv", eig.grid, eig.profile);
  export_fields(ctx, runs[0].grid, runs[0].slices, 3);
  return out;
}

// ---------------------------------------------------------------------------
// affine-coincidence: affine boundary data in a 3-ball absorbs a compact bump
// in finite time, two-sidedly for the middle eigenvalue and one-sidedly for
// the extremes.

Outcome scenario_affine_coincidence(Ctx& ctx) {
  DppConfig defs;
  defs.epsilon = 0.15;
  defs.h = 0.15;
  defs.j = 2;
  defs.horizon = 2.6;
  defs.resolution = 16;
  DppConfig cfg = read_solver(ctx.cfg, defs, 3);
  require_all_read(ctx.cfg);
  cfg.seed = ctx.seed;

  const Domain dom = Domain::ball(Vec{0.0, 0.0, 0.0}, 1.0);
  const Affine pi{Vec{0.3, -0.1, 0.15}, 0.2};
  PayoffData data;
  data.g = [pi](const Vec& x, double) { return pi(x); };
  data.u0 = [pi](const Vec& x) { return pi(x) + std::max(0.0, 1.0 - norm2(x)); };

  Outcome out;
  out.config = json{{"solver", solver_json(cfg)},
                    {"data", {{"gradient", {0.3, -0.1, 0.15}}, {"offset", 0.2}}}};

  const double tol = std::max(0.02, 3.0 * cfg.epsilon);
  ParabolicResult run = solve_parabolic(dom, data, cfg);
  const ValueSlice z = profile_slice(run.grid, [pi](const Vec& x) { return pi(x); });

  const CoincidenceReport rep = detect_coincidence(run.slices, run.grid, z, tol);
  out.checks.le("two-sided-tstar", rep.global_t, 2.5,
                std::to_string(rep.censored_nodes) + " censored");

  DppConfig c1 = cfg;
  c1.j = 1;
  ParabolicResult run1 = solve_parabolic(dom, data, c1);
  const CoincidenceReport rep1 =
      one_sided_coincidence(run1.slices, run1.grid, z, tol, Side::Below);
  out.checks.le("below-tstar-j1", rep1.global_t, 2.5);

  // For j = N the binding side is from below, so the bump is mirrored;
  // otherwise u >= pi holds from the start and the check says nothing.
  DppConfig c3 = cfg;
  c3.j = 3;
  PayoffData data3;
  data3.g = data.g;
  data3.u0 = [pi](const Vec& x) { return pi(x) - std::max(0.0, 1.0 - norm2(x)); };
  ParabolicResult run3 = solve_parabolic(dom, data3, c3);
  const CoincidenceReport rep3 =
      one_sided_coincidence(run3.slices, run3.grid, z, tol, Side::Above);
  out.checks.le("above-tstar-j3", rep3.global_t, 2.5);

  // A full affine slice is a fixed point of the update to rounding error.
  const FrameSet frames = generate_frames(3, cfg.j, cfg.resolution, cfg.seed);
  PayoffData affine_data;
  affine_data.g = data.g;
  affine_data.u0 = [pi](const Vec& x) { return pi(x); };
  const ValueSlice zfull = profile_slice(run.grid, [pi](const Vec& x) { return pi(x); }, 1.0);
  const ValueSlice upd = dpp_update(zfull, run.grid, affine_data, frames, cfg.epsilon, 1.0);
  double stat = 0.0;
  for (std::size_t id : run.grid.interior_nodes())
    stat = std::max(stat, std::abs(upd.values[id] - pi(run.grid.point(id))));
  out.checks.le("affine-stationarity", stat, 1e-9);

  std::vector<double> times, gaps;
  for (const ValueSlice& s : run.slices) {
    times.push_back(s.time);
    gaps.push_back(sup_gap(s, z, run.grid.interior_nodes()));
  }
  out.checks.le("monotone-gaps", monotone_violations(gaps, 1e-9), 0.0);

  write_curve_csv(ctx.out + "/decay.csv", "t", "sup_gap", times, gaps);
  export_fields(ctx, run.grid, run.slices, 3);
  return out;
}

// ---------------------------------------------------------------------------
// segment-example: g = |x2| on the unit disk. Nodes on the segment {x2 = 0}
// stay strictly above the envelope value 0 for the whole run, at a level
// stable across refinement, while off-segment nodes coincide.

Outcome scenario_segment_example(Ctx& ctx) {
  DppConfig defs;
  defs.epsilon = 0.15;
  defs.j = 1;
  defs.horizon = 3.0;
  defs.resolution = 90;
  defs.h = defs.epsilon / 2.0;
  DppConfig coarse = read_solver(ctx.cfg, defs, 2);
  require_all_read(ctx.cfg);
  coarse.seed = ctx.seed;
  DppConfig fine = coarse;
  fine.epsilon = coarse.epsilon * 2.0 / 3.0;
  fine.h = fine.epsilon / 2.0;

  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  PayoffData data;
  data.g = [](const Vec& x, double) { return std::abs(x[1]); };
  data.u0 = [](const Vec& x) { return std::max(0.0, 1.0 - norm2(x)) + std::abs(x[1]); };

  Outcome out;
  out.config = json{{"solver", solver_json(coarse)},
                    {"refined", {{"epsilon", fine.epsilon}, {"h", fine.h}}}};

  struct RunStats {
    std::vector<double> times, mins, gaps;
    double c_all = kInf;   // min over the whole segment, all levels
    double c_mid = kInf;   // same restricted to |x1| <= 0.9
  };
  auto measure = [&](const ParabolicResult& run, const DppConfig& c) {
    const ValueSlice z = profile_slice(run.grid, [](const Vec& x) { return std::abs(x[1]); });
    RunStats st;
    std::vector<std::size_t> segment;
    for (std::size_t id : run.grid.interior_nodes())
      if (std::abs(run.grid.point(id)[1]) < 0.25 * c.h) segment.push_back(id);
    if (segment.empty()) throw SolverFailure("no lattice nodes on the segment");
    for (const ValueSlice& s : run.slices) {
      double m = kInf, mmid = kInf;
      for (std::size_t id : segment) {
        m = std::min(m, s.values[id]);
        if (std::abs(run.grid.point(id)[0]) <= 0.9 + 0.25 * c.h)
          mmid = std::min(mmid, s.values[id]);
      }
      st.times.push_back(s.time);
      st.mins.push_back(m);
      st.gaps.push_back(sup_gap(s, z, run.grid.interior_nodes()));
      st.c_all = std::min(st.c_all, m);
      st.c_mid = std::min(st.c_mid, mmid);
    }
    return st;
  };

  const ParabolicResult coarse_run = solve_parabolic(dom, data, coarse);
  const RunStats coarse_st = measure(coarse_run, coarse);
  const ParabolicResult fine_run = solve_parabolic(dom, data, fine);
  const RunStats fine_st = measure(fine_run, fine);

  // Floor pinned two orders of magnitude under the observed minimum, which is
  // set by the segment nodes closest to the boundary.
  const double floor = 1e-6;
  out.checks.ge("segment-positive-coarse", coarse_st.c_all, floor);
  out.checks.ge("segment-positive-fine", fine_st.c_all, floor);
  const double ratio = std::min(coarse_st.c_mid, fine_st.c_mid) /
                       std::max({coarse_st.c_mid, fine_st.c_mid, 1e-300});
  out.checks.ge("refinement-stability", ratio, 0.2,
                "c = " + fmt17(coarse_st.c_mid) + " / " + fmt17(fine_st.c_mid));

  // Off the segment the value settles onto |x2| within tolerance.
  const ValueSlice zf = profile_slice(fine_run.grid, [](const Vec& x) { return std::abs(x[1]); });
  const CoincidenceReport rep = detect_coincidence(fine_run.slices, fine_run.grid, zf, 0.3);
  std::size_t off_censored = 0;
  for (std::size_t i = 0; i < rep.nodes.size(); ++i)
    if (std::abs(fine_run.grid.point(rep.nodes[i])[1]) >= 0.3 && std::isinf(rep.t_star[i]))
      ++off_censored;
  out.checks.le("offaxis-coincidence", double(off_censored), 0.0);

  // The segment minimum itself decays at the one-dimensional section rate.
  const DecayFit seg_fit = fit_decay_curve(fine_st.times, fine_st.mins, 1e-7);
  const double section_rate = kPi * kPi / 4.0;
  out.checks.flag("segment-rate-fit", seg_fit.valid, seg_fit.note);
  out.checks.le("segment-rate", std::abs(seg_fit.mu - section_rate) / section_rate, 0.3,
                "mu = " + fmt17(seg_fit.mu));

  out.checks.le("monotone-gaps",
                monotone_violations(coarse_st.gaps, 1e-9) + monotone_violations(fine_st.gaps, 1e-9),
                0.0);

  write_curve_csv(ctx.out + "/decay.csv", "t", "sup_gap", fine_st.times, fine_st.gaps);
  write_curve_csv(ctx.out + "/segment_min.csv", "t", "min_u", fine_st.times, fine_st.mins);
  write_curve_csv(ctx.out + "/segment_min_coarse.csv", "t", "min_u", coarse_st.times,
                  coarse_st.mins);
  export_fields(ctx, fine_run.grid, fine_run.slices, 3);
  return out;
}

// ---------------------------------------------------------------------------
// halfspace: one-sided coincidence on {x1 > 0} with waiting times shrinking
// away from the hyperplane.

Outcome scenario_halfspace(Ctx& ctx) {
  DppConfig defs;
  defs.epsilon = 0.12;
  defs.h = 0.06;
  defs.j = 1;
  defs.horizon = 2.5;
  defs.resolution = 90;
  DppConfig cfg = read_solver(ctx.cfg, defs, 2);
  require_all_read(ctx.cfg);
  cfg.seed = ctx.seed;
  if (cfg.j != 1) throw ConfigError("halfspace scenario requires solver.j = 1");

  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const Affine pi{Vec{0.5, 0.0}, 0.25};
  const Vec w = Vec::axis(2, 0);
  const double tol = std::max(0.02, 3.0 * cfg.epsilon);

  // Same data halfspace_scenario builds: boundary pi plus a kink on the far
  // side, initial datum lifted by the inscribed-ball bump.
  const double R = dom.inscribed_radius();
  PayoffData data;
  data.g = [pi](const Vec& x, double) { return pi(x) + std::max(0.0, -x[0]); };
  data.u0 = [pi, R](const Vec& x) {
    return pi(x) + std::max(0.0, -x[0]) + std::max(0.0, R * R - norm2(x));
  };

  ParabolicResult run = solve_parabolic(dom, data, cfg);
  const ValueSlice z = profile_slice(run.grid, [pi](const Vec& x) { return pi(x); });
  const HalfspaceReport rep =
      halfspace_coincidence(run.slices, run.grid, z, tol, Side::Below, w, 0.0, 8);

  Outcome out;
  out.config = json{{"solver", solver_json(cfg)},
                    {"data", {{"gradient", {0.5, 0.0}}, {"offset", 0.25}, {"theta", 0.0}}},
                    {"tol", tol}};

  std::size_t deep_censored = 0, shallow_bound_breaks = 0;
  for (std::size_t i = 0; i < rep.base.nodes.size(); ++i) {
    const double x1 = run.grid.point(rep.base.nodes[i])[0];
    if (!std::isinf(rep.base.t_star[i])) continue;
    if (x1 >= 0.5 - 0.25 * cfg.h) ++deep_censored;
    if (x1 >= 0.25) ++shallow_bound_breaks;
  }
  out.checks.le("deep-finite", double(deep_censored), 0.0,
                std::to_string(rep.base.censored_nodes) + " censored total");
  out.checks.le("bucket-monotone", double(rep.monotonicity_violations), 0.0);
  out.checks.le("censored-shallow", double(shallow_bound_breaks), 0.0,
                "censoring confined to x1 < 0.25");

  // theta = -2 puts the whole disk inside the halfspace and the kink outside
  // the closure, so the run reduces to the plain affine absorption.
  const HalfspaceReport flat = halfspace_scenario(dom, pi, w, -2.0, cfg, tol);
  out.checks.le("degenerate-affine", flat.base.global_t, 2.5,
                std::to_string(flat.base.censored_nodes) + " censored");

  std::vector<double> times, gaps;
  std::vector<std::size_t> half_nodes;
  for (std::size_t id : run.grid.interior_nodes())
    if (run.grid.point(id)[0] > 0.0) half_nodes.push_back(id);
  for (const ValueSlice& s : run.slices) {
    double m = 0.0;
    for (std::size_t id : half_nodes) m = std::max(m, s.values[id] - z.values[id]);
    times.push_back(s.time);
    gaps.push_back(m);
  }
  write_curve_csv(ctx.out + "/halfspace_gap.csv", "t", "max_excess", times, gaps);
  export_fields(ctx, run.grid, run.slices, 3);
  return out;
}

// ---------------------------------------------------------------------------
// game-vs-dpp: value-iteration strategies replayed as actual games reproduce
// the solver values, and the random-walk diagnostics behave.

Outcome scenario_game_vs_dpp(Ctx& ctx) {
  DppConfig defs;
  defs.epsilon = 0.2;
  defs.h = 0.05;
  defs.j = 1;
  defs.horizon = 0.4;
  defs.resolution = 90;
  DppConfig cfg = read_solver(ctx.cfg, defs, 2);
  const int runs = ctx.cfg.get_int("game.runs", 5000);
  const int tail_runs = ctx.cfg.get_int("game.tail_runs", 4000);
  const int bins = ctx.cfg.get_int("game.bins", 20);
  require_all_read(ctx.cfg);
  if (cfg.keep_every != 1) throw ConfigError("game-vs-dpp requires solver.keep_every = 1");
  if (runs < 100 || tail_runs < 100) throw ConfigError("game.runs and game.tail_runs must be >= 100");
  if (bins < 4) throw ConfigError("game.bins must be >= 4");
  cfg.seed = ctx.seed;

  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  PayoffData data;
  data.g = [](const Vec& x, double) { return 0.5 * x[0] * x[0] - 0.3 * x[1] + 0.2; };
  data.u0 = [](const Vec& x) { return 0.5 * x[0] * x[0] - 0.3 * x[1] + 0.2; };

  ParabolicResult run = solve_parabolic(dom, data, cfg);
  if (std::abs(run.slices.back().time - cfg.horizon) > 1e-9)
    throw SolverFailure("final level does not land on the horizon");

  const FrameSet frames = generate_frames(2, cfg.j, cfg.resolution, cfg.seed);
  const DppOperator op(run.grid, data, frames, cfg.epsilon, DppOperator::Mode::TimeDependent);
  const ValueStrategyPair pair = value_strategy_pair(op, run.slices);

  GameSetup setup;
  setup.domain = &dom;
  setup.payoff = &data;
  setup.frames = &frames;
  setup.epsilon = cfg.epsilon;
  setup.mode = DppOperator::Mode::TimeDependent;

  Outcome out;
  out.config = json{{"solver", solver_json(cfg)},
                    {"game", {{"runs", runs}, {"tail_runs", tail_runs}, {"bins", bins}}}};

  const Vec probes[] = {Vec{0.0, 0.0}, Vec{0.25, 0.0}, Vec{-0.25, 0.25}, Vec{0.4, -0.3},
                        Vec{-0.05, -0.45}};
  std::vector<GameTrajectory> pooled;
  pooled.reserve(std::size_t(runs) * 5);
  std::ostringstream games;
  games << "x1,x2,dpp_value,game_mean,std_error,ci95,gap\n";
  int probe_idx = 0;
  for (const Vec& p : probes) {
    const std::size_t id = node_at(run.grid, p);
    const double dpp_value = run.slices.back().values[id];
    std::vector<GameTrajectory> traj =
        run_games(setup, pair.minimizer, pair.maximizer, run.grid.point(id), cfg.horizon,
                  mix_seed({ctx.seed, 0x67616d65u, std::uint64_t(probe_idx)}), std::size_t(runs));
    const ValueEstimate est = estimate_value(traj);
    const double gap = std::abs(est.mean - dpp_value);
    out.checks.le("probe-" + std::to_string(probe_idx), gap, std::max(0.02, 3.0 * est.ci95),
                  "(" + fmt17(p[0]) + ", " + fmt17(p[1]) + ") dpp " + fmt17(dpp_value));
    games << fmt17(p[0]) << "," << fmt17(p[1]) << "," << fmt17(dpp_value) << ","
          << fmt17(est.mean) << "," << fmt17(est.std_error) << "," << fmt17(est.ci95) << ","
          << fmt17(gap) << "\n";
    for (GameTrajectory& t : traj) pooled.push_back(std::move(t));
    ++probe_idx;
  }
  const MartingaleReport mart = martingale_diagnostics(pooled);
  out.checks.flag("martingale-identity", mart.identity_ok && mart.step_ok,
                  "gap " + fmt17(mart.identity_gap_mean) + " +- " + fmt17(mart.identity_gap_se));

  // Clockless batch for the exit-time tail.
  GameSetup stat = setup;
  stat.mode = DppOperator::Mode::Stationary;
  std::vector<GameTrajectory> walkers =
      run_games(stat, random_frame_rule(), random_direction_rule(), Vec{0.1, 0.05}, 0.0,
                mix_seed({ctx.seed, 0x7461696cu}), std::size_t(tail_runs));
  const TailReport tail = exit_tail(walkers, bins);
  out.checks.flag("tail-slope", tail.slope_valid && tail.slope < 0.0,
                  "slope " + fmt17(tail.slope));
  const double R = dom.enclosing_radius();
  out.checks.le("exit-mean", tail.mean_time,
                0.5 * (R + cfg.epsilon) * (R + cfg.epsilon) + 3.0 * tail.mean_time_se,
                std::to_string(tail.censored) + " censored");

  write_file(ctx.out + "/games.csv", games.str());
  write_curve_csv(ctx.out + "/tail.csv", "t", "survival", tail.t, tail.survival);
  export_fields(ctx, run.grid, run.slices, 3);
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch.

struct Entry {
  const char* name;
  Outcome (*fn)(Ctx&);
};

constexpr Entry kScenarios[] = {
    {"heat1d", scenario_heat1d},
    {"matrix-props", scenario_matrix_props},
    {"disk-envelope", scenario_disk_envelope},
    {"eigen-decay", scenario_eigen_decay},
    {"affine-coincidence", scenario_affine_coincidence},
    {"segment-example", scenario_segment_example},
    {"halfspace", scenario_halfspace},
    {"game-vs-dpp", scenario_game_vs_dpp},
};

}  // namespace

// ---------------------------------------------------------------------------
// ConfigFile.

ConfigFile ConfigFile::parse_text(const std::string& text) {
  ConfigFile f;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    std::string s = trim(cut == std::string::npos ? line : line.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') bad_line(lineno, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) bad_line(lineno, "empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) bad_line(lineno, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) bad_line(lineno, "empty key");
    if (section.empty()) bad_line(lineno, "key '" + key + "' outside any [section]");
    const std::string full = section + "." + key;
    if (!f.kv_.emplace(full, val).second) bad_line(lineno, "duplicate key '" + full + "'");
  }
  return f;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return parse_text(body.str());
}

bool ConfigFile::has(const std::string& key) const {
  touched_.insert(key);
  return kv_.count(key) != 0;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  touched_.insert(key);
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("value for " + key + " is not a number: '" + it->second + "'");
  return v;
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
  touched_.insert(key);
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  char* end = nullptr;
  const long v = std::strtol(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0' || v < INT_MIN || v > INT_MAX)
    throw ConfigError("value for " + key + " is not an integer: '" + it->second + "'");
  return static_cast<int>(v);
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  touched_.insert(key);
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("value for " + key + " is not an unsigned integer: '" + it->second + "'");
  return v;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  touched_.insert(key);
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::vector<std::string> ConfigFile::untouched_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : kv_)
    if (!touched_.count(key)) out.push_back(key);
  return out;
}

// ---------------------------------------------------------------------------
// Runner.

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const Entry& e : kScenarios) v.push_back(e.name);
    return v;
  }();
  return names;
}

const char* version_string() { return kVersion; }

ScenarioResult run_scenario(const std::string& name, const std::string& config_path,
                            const std::string& out_dir, std::uint64_t seed, int levels_override) {
  const Entry* entry = nullptr;
  for (const Entry& e : kScenarios)
    if (name == e.name) entry = &e;
  if (!entry) return {2, {}, "unknown scenario '" + name + "'"};

  ConfigFile cfg;
  try {
    if (!config_path.empty()) cfg = ConfigFile::parse_file(config_path);
  } catch (const ConfigError& e) {
    return {2, {}, e.what()};
  }

  Ctx ctx{cfg, out_dir, seed, levels_override};
  ScenarioResult result;
  try {
    std::filesystem::create_directories(out_dir);
    Outcome out = entry->fn(ctx);

    result.checks = out.checks.items;
    bool all = true;
    int failed = 0;
    for (const CheckResult& c : result.checks)
      if (!c.passed) {
        all = false;
        ++failed;
      }
    result.exit_code = all ? 0 : 1;
    if (!all) result.message = std::to_string(failed) + " check(s) failed";

    json meta{{"tool", "eigenflow"},
              {"version", kVersion},
              {"scenario", name},
              {"seed", seed},
              {"levels", levels_override},
              {"workers", worker_count()},
              {"config", out.config}};
    write_file(out_dir + "/meta.json", meta.dump(2) + "\n");

    json checks = json::array();
    for (const CheckResult& c : result.checks)
      checks.push_back(json{{"name", c.name},
                            {"passed", c.passed},
                            {"measured", c.measured},
                            {"threshold", c.threshold},
                            {"detail", c.detail}});
    json report{{"scenario", name}, {"passed", all}, {"exit_code", result.exit_code},
                {"checks", checks}};
    write_file(out_dir + "/report.json", report.dump(2) + "\n");
  } catch (const ConfigError& e) {
    return {2, {}, e.what()};
  } catch (const std::exception& e) {
    return {3, {}, e.what()};
  }
  return result;
}

}  // namespace eigenflow
