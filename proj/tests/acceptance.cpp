// End-to-end acceptance gate. Runs every release criterion and prints one
// PASS/FAIL line per criterion; the exit code is the number of failures.
// Scenario-backed criteria rerun the shipped scenarios with their default
// configurations, so the thresholds live in the scenario code itself. The
// remaining criteria are computed directly here against analytic identities.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eigenflow/asymptotics.hpp"
#include "eigenflow/dpp.hpp"
#include "eigenflow/eig.hpp"
#include "eigenflow/game.hpp"
#include "eigenflow/rng.hpp"
#include "eigenflow/scenario.hpp"

using namespace eigenflow;
namespace fs = std::filesystem;

namespace {

struct ScenRun {
  ScenarioResult res;
  double seconds = 0.0;
};

ScenRun timed_run(const std::string& name, const std::string& out_dir, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  ScenRun r;
  r.res = run_scenario(name, "", out_dir, seed);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string failed_checks(const ScenarioResult& res) {
  if (res.exit_code != 0 && res.checks.empty()) return res.message;
  std::string s;
  for (const auto& c : res.checks)
    if (!c.passed) s += (s.empty() ? "" : ", ") + c.name;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> dir_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

int g_failures = 0;

void report(int id, const std::string& label, bool ok, const std::string& detail) {
  if (!ok) ++g_failures;
  std::printf("[%2d] %s  %-26s %s\n", id, ok ? "PASS" : "FAIL", label.c_str(), detail.c_str());
  std::fflush(stdout);
}

void report_scenario(int id, const std::string& label, const ScenRun& run, double time_limit) {
  const bool in_time = time_limit <= 0.0 || run.seconds < time_limit;
  const bool ok = run.res.exit_code == 0 && in_time;
  char detail[160];
  if (ok) {
    std::snprintf(detail, sizeof detail, "%zu checks, %.1f s", run.res.checks.size(),
                  run.seconds);
  } else if (!in_time) {
    std::snprintf(detail, sizeof detail, "took %.1f s, limit %.0f s", run.seconds, time_limit);
  } else {
    std::snprintf(detail, sizeof detail, "exit %d: %s", run.res.exit_code,
                  failed_checks(run.res).c_str());
  }
  report(id, label, ok, detail);
}

// One dpp step applied to a quadratic q(x) = x'Ax/2 + b'x + c must shift it
// by eps^2/2 times the j-th smallest eigenvalue of A, up to the direction
// resolution and the multilinear interpolation error.
void quadratic_one_step() {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const double eps = 0.1, h = 0.05;
  const Grid grid = build_grid(dom, h, eps);
  const FrameSet frames_lo = generate_frames(2, 1, 90, 1);
  const FrameSet frames_hi = generate_frames(2, 2, 90, 1);

  Rng rng(mix_seed({2026, 2}));
  double worst_ratio = 0.0;
  int violations = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const SymMatrix a = SymMatrix::random(2, rng);
    const Vec b{rng.gaussian(), rng.gaussian()};
    const double c = rng.gaussian();
    const auto q = [&](const Vec& x) { return 0.5 * a.quad(x) + dot(b, x) + c; };

    ValueSlice prev;
    prev.time = 0.0;
    prev.epsilon = eps;
    prev.values.assign(grid.node_count(), 0.0);
    for (std::size_t id = 0; id < grid.node_count(); ++id)
      if (grid.carries_value(id)) prev.values[id] = q(grid.point(id));

    PayoffData data;
    data.g = [&q](const Vec& x, double) { return q(x); };
    data.u0 = q;

    const double tol = (0.02 + 2.0 * h * h) * a.frobenius() + 1e-12;
    for (int j : {1, 2}) {
      const ValueSlice next = dpp_update(prev, grid, data, j == 1 ? frames_lo : frames_hi, eps,
                                         0.5 * eps * eps);
      const double shift = 0.5 * eps * eps * lambda_j(a, j);
      for (std::size_t id : grid.interior_nodes()) {
        const double gap = std::abs(next.values[id] - (q(grid.point(id)) + shift));
        worst_ratio = std::max(worst_ratio, gap / tol);
        if (gap > tol) ++violations;
      }
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof detail,
                "50 quadratics, j in {1,2}, worst gap %.3f of tolerance", worst_ratio);
  report(2, "quadratic-one-step", violations == 0, detail);
}

// lambda_1(A) + lambda_j(B) <= lambda_j(A+B) <= lambda_N(A) + lambda_j(B).
void eigenvalue_sum_bounds() {
  Rng rng(mix_seed({2026, 3}));
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + k % 5;
    const SymMatrix a = SymMatrix::random(n, rng);
    const SymMatrix b = SymMatrix::random(n, rng);
    const Vec la = eigenvalues_sym(a);
    const Vec lb = eigenvalues_sym(b);
    const Vec lc = eigenvalues_sym(a + b);
    for (int j = 0; j < n; ++j) {
      worst = std::max(worst, la[0] + lb[j] - lc[j]);
      worst = std::max(worst, lc[j] - (la[n - 1] + lb[j]));
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof detail, "1000 pairs, worst bound violation %.3g (limit 1e-9)",
                worst);
  report(3, "eigenvalue-sum-bounds", worst <= 1e-9, detail);
}

// With the frame held normal to x - center, |x - center|^2 grows by exactly
// eps^2 per round, so rounds spent inside the unit ball never exceed
// (R^2 - |x0|^2)/eps^2 and the exit round is at most one more.
void orthogonal_strategy_bound() {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  PayoffData data;
  data.g = [](const Vec& x, double) { return x[0] + 0.5; };
  data.u0 = [](const Vec& x) { return x[0] + 0.5; };
  const FrameSet frames = generate_frames(2, 1, 30, 1);

  GameSetup setup;
  setup.domain = &dom;
  setup.payoff = &data;
  setup.frames = &frames;
  setup.epsilon = 0.2;
  setup.mode = DppOperator::Mode::Stationary;

  const FrameRule minimizer = orthogonal_frame_rule(Vec{0.0, 0.0}, 1);
  // starts sit a quarter step or more away from an integral round bound, so
  // the exit round is unambiguous in floating point
  const std::vector<Vec> starts = {Vec{0.3, 0.4}, Vec{0.5, 0.0}, Vec{0.2, 0.1}, Vec{0.6, 0.3},
                                   Vec{0.7, 0.1}};
  const double eps2 = setup.epsilon * setup.epsilon;

  long total = 0;
  int bound_violations = 0, growth_violations = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const Vec x0 = starts[s];
    const double bound = (1.0 - norm2(x0)) / eps2;
    const auto traj = run_games(setup, minimizer, random_direction_rule(), x0, 0.0,
                                mix_seed({2026, 8, s}), 2000);
    for (const auto& t : traj) {
      ++total;
      if (t.censored || static_cast<double>(t.tau) - 1.0 > bound + 1e-9) ++bound_violations;
      const double growth = norm2(t.exit_state) - norm2(x0);
      if (std::abs(growth - eps2 * static_cast<double>(t.tau)) > 1e-9) ++growth_violations;
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof detail,
                "%ld trajectories, %d bound violations, %d growth violations", total,
                bound_violations, growth_violations);
  report(8, "orthogonal-strategy-bound", bound_violations == 0 && growth_violations == 0,
         detail);
}

void radial_barrier() {
  double worst = 0.0;
  bool ok = true;
  const std::vector<std::pair<double, double>> cases = {{1.0, 2.0}, {0.5, 1.0}, {2.0, 0.1}};
  for (const auto& [r, c] : cases)
    for (int dim : {2, 3}) {
      const BarrierReport rep = verify_radial_barrier(r, c, barrier_sample_points(dim, r));
      ok = ok && rep.ok;
      worst = std::max({worst, rep.value_continuity_gap, rep.derivative_continuity_gap,
                        rep.boundary_value_gap, rep.max_inside_residual,
                        rep.max_annulus_residual});
    }
  char detail[120];
  std::snprintf(detail, sizeof detail,
                "3 (r, c) cases in dims 2 and 3, worst identity gap %.3g (limit 1e-12)", worst);
  report(10, "radial-barrier", ok && worst <= 1e-12, detail);
}

}  // namespace

int main() {
  const fs::path root = "acceptance_out";
  fs::remove_all(root);
  fs::create_directories(root);

  std::printf("running %zu scenarios with default settings...\n", scenario_names().size());
  std::fflush(stdout);
  std::map<std::string, ScenRun> first;
  for (const std::string& name : scenario_names())
    first[name] = timed_run(name, (root / "a" / name).string(), 1);

  report_scenario(1, "heat-1d-reduction", first.at("heat1d"), 30.0);
  quadratic_one_step();
  eigenvalue_sum_bounds();
  report_scenario(4, "envelope-agreement", first.at("disk-envelope"), 300.0);
  report_scenario(5, "exponential-stabilization", first.at("eigen-decay"), 0.0);
  report_scenario(6, "finite-time-coincidence", first.at("affine-coincidence"), 0.0);
  report_scenario(7, "game-vs-dpp-agreement", first.at("game-vs-dpp"), 0.0);
  orthogonal_strategy_bound();
  report_scenario(9, "segment-positivity", first.at("segment-example"), 0.0);
  radial_barrier();

  // Every scenario again with the same seeds; artifacts must be byte-identical.
  bool identical = true;
  std::string diff;
  for (const std::string& name : scenario_names()) {
    timed_run(name, (root / "b" / name).string(), 1);
    const auto a = dir_bytes(root / "a" / name);
    const auto b = dir_bytes(root / "b" / name);
    if (a.empty() || a.size() != b.size()) {
      identical = false;
      diff = name + ": file sets differ";
      continue;
    }
    for (const auto& [file, bytes] : a)
      if (!b.count(file) || b.at(file) != bytes) {
        identical = false;
        diff = name + "/" + file;
      }
  }
  report(11, "determinism", identical,
         identical ? "8 scenarios rerun byte-identical" : "first mismatch: " + diff);

  std::printf("acceptance: %d/11 passed\n", 11 - g_failures);
  return g_failures;
}
