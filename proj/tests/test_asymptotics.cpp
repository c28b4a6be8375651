#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "eigenflow/asymptotics.hpp"

using namespace eigenflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

ValueSlice fill_slice(const Grid& grid, const std::function<double(const Vec&)>& f,
                      double time = 0.0) {
  ValueSlice s;
  s.time = time;
  s.epsilon = grid.epsilon();
  s.values.assign(grid.node_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t id = 0; id < grid.node_count(); ++id)
    if (grid.carries_value(id)) s.values[id] = f(grid.point(id));
  return s;
}

}  // namespace

TEST_CASE("decay fit recovers a clean exponential exactly") {
  std::vector<double> times, gaps;
  for (int k = 0; k <= 200; ++k) {
    const double t = 0.01 * k;
    times.push_back(t);
    gaps.push_back(3.0 * std::exp(-2.5 * t));
  }
  const DecayFit fit = fit_decay_curve(times, gaps, 1e-12);
  REQUIRE(fit.valid);
  CHECK(fit.mu == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(fit.amplitude == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decay fit censors the noise floor and flags flat curves") {
  std::vector<double> times, gaps;
  for (int k = 0; k <= 300; ++k) {
    const double t = 0.02 * k;
    times.push_back(t);
    gaps.push_back(std::max(2.0 * std::exp(-4.0 * t), 1e-5));
  }
  const DecayFit fit = fit_decay_curve(times, gaps, 2e-5);
  REQUIRE(fit.valid);
  // the flat tail sits below the floor and must not drag the slope down
  CHECK(fit.mu == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(times[fit.fit_end - 1] < 3.2);

  std::vector<double> flat(times.size(), 1e-7);
  const DecayFit conv = fit_decay_curve(times, flat, 1e-5);
  CHECK(conv.already_converged);
  CHECK_FALSE(conv.valid);
}

TEST_CASE("principal rate on the interval matches an independent matrix oracle") {
  const Domain dom = Domain::ball(Vec{0.5}, 0.5);
  DppConfig cfg;
  cfg.epsilon = 0.03;
  cfg.h = 0.02;  // off-lattice jumps, so the two step parities stay coupled
  cfg.j = 1;
  cfg.resolution = 2;
  const EigenEstimate est = estimate_principal_eigenvalue(dom, EigenMode::Largest, cfg);
  REQUIRE(est.converged);

  // Oracle: assemble the one-step averaging operator row by row (boundary
  // reads contribute zero) and power-iterate it with plain dense arithmetic.
  // The eigen machinery under test never sees this matrix.
  const Grid& grid = est.grid;
  const auto& interior = grid.interior_nodes();
  std::vector<std::size_t> col_of(grid.node_count(), SIZE_MAX);
  for (std::size_t i = 0; i < interior.size(); ++i) col_of[interior[i]] = i;

  const std::size_t n = interior.size();
  std::vector<double> M(n * n, 0.0);
  std::size_t corners[2];
  double weights[2];
  for (std::size_t r = 0; r < n; ++r) {
    const Vec x = grid.point(interior[r]);
    for (double sgn : {1.0, -1.0}) {
      const Vec y = x + sgn * cfg.epsilon * Vec{1.0};
      if (!dom.inside(y)) continue;  // exits read g = 0
      grid.cell(y, corners, weights);
      for (int c = 0; c < 2; ++c) {
        if (col_of[corners[c]] == SIZE_MAX) continue;  // strip nodes hold 0
        M[r * n + col_of[corners[c]]] += 0.5 * weights[c];
      }
    }
  }
  std::vector<double> v(n, 1.0), w(n, 0.0);
  double rho = 0.0;
  for (int it = 0; it < 60000; ++it) {
    double top = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += M[r * n + c] * v[c];
      w[r] = s;
      top = std::max(top, std::abs(s));
    }
    const double next = top;
    for (std::size_t r = 0; r < n; ++r) v[r] = w[r] / top;
    if (it > 1000 && std::abs(next - rho) < 1e-14) {
      rho = next;
      break;
    }
    rho = next;
  }
  const double mu_oracle = -std::log(rho) / (0.5 * cfg.epsilon * cfg.epsilon);

  CHECK(std::abs(est.mu - mu_oracle) <= 0.01 * mu_oracle);
  // principal Dirichlet eigenvalue of the interval is pi^2
  CHECK(std::abs(mu_oracle - kPi * kPi) <= 0.15 * kPi * kPi);

  // profile shape against the continuum eigenfunction
  double sup = 0.0;
  for (std::size_t id : grid.interior_nodes()) sup = std::max(sup, est.profile.values[id]);
  REQUIRE(sup > 0.0);
  double worst = 0.0;
  for (std::size_t id : grid.interior_nodes()) {
    const double x = grid.point(id)[0];
    worst = std::max(worst, std::abs(est.profile.values[id] / sup - std::sin(kPi * x)));
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("doubling the disk radius divides the rate by four") {
  DppConfig cfg;
  cfg.epsilon = 0.15;
  cfg.h = 0.075;
  cfg.resolution = 24;
  const EigenEstimate small =
      estimate_principal_eigenvalue(Domain::ball(Vec{0.0, 0.0}, 0.75), EigenMode::Largest, cfg);
  const EigenEstimate big =
      estimate_principal_eigenvalue(Domain::ball(Vec{0.0, 0.0}, 1.5), EigenMode::Largest, cfg);
  REQUIRE(small.converged);
  REQUIRE(big.converged);
  CHECK(small.mu > 0.0);
  CHECK(big.mu > 0.0);
  CHECK(std::abs(small.mu / big.mu - 4.0) <= 0.2 * 4.0);
}

TEST_CASE("smallest mode mirrors the largest with a negative profile") {
  const Domain dom = Domain::ball(Vec{0.5}, 0.5);
  DppConfig cfg;
  cfg.epsilon = 0.05;
  cfg.h = 0.025;
  cfg.resolution = 2;
  const EigenEstimate up = estimate_principal_eigenvalue(dom, EigenMode::Largest, cfg);
  const EigenEstimate dn = estimate_principal_eigenvalue(dom, EigenMode::Smallest, cfg);
  REQUIRE(up.converged);
  REQUIRE(dn.converged);
  CHECK(up.mu == doctest::Approx(dn.mu).epsilon(1e-6));
  for (std::size_t id : dn.grid.interior_nodes()) CHECK(dn.profile.values[id] <= 1e-12);
}

TEST_CASE("radial barrier identities hold to machine precision") {
  for (const auto& rc : std::vector<std::pair<double, double>>{{1.0, 2.0}, {0.5, 1.0}, {2.0, 0.1}}) {
    const double r = rc.first, c = rc.second;
    for (int dim : {2, 3}) {
      const BarrierReport rep = verify_radial_barrier(r, c, barrier_sample_points(dim, r));
      CHECK(rep.ok);
      CHECK(rep.value_continuity_gap <= 1e-12);
      CHECK(rep.derivative_continuity_gap <= 1e-12);
      CHECK(rep.boundary_value_gap <= 1e-12);
      CHECK(rep.max_inside_residual <= 1e-12);
      CHECK(rep.max_annulus_residual <= 1e-12);
      CHECK(rep.dim == dim);
    }
  }
}

TEST_CASE("barrier profile values at the landmarks") {
  // r = 1, c = 2: center value 3 c r^2 / 8 = 0.75, kink value c1 (r - r/2) = 0.5
  CHECK(radial_barrier_value(1.0, 2.0, 0.0) == doctest::Approx(0.75));
  CHECK(radial_barrier_value(1.0, 2.0, 0.5) == doctest::Approx(0.5));
  CHECK(radial_barrier_value(1.0, 2.0, 1.0) == doctest::Approx(0.0));
  // inside branch is the paraboloid c2 - (c/2) s^2
  CHECK(radial_barrier_value(1.0, 2.0, 0.25) == doctest::Approx(0.75 - 0.0625));
  // hessian inside: -c on the diagonal
  const SymMatrix h = radial_barrier_hessian(2, 1.0, 2.0, Vec{0.1, 0.05});
  CHECK(lambda_j(h, 2) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("coincidence times are read off slice stacks") {
  const Domain dom = Domain::ball(Vec{0.5}, 0.5);
  const Grid grid = build_grid(dom, 0.05, 0.1);
  const auto bump = [](const Vec& x) { return std::max(0.0, 1.0 - 16.0 * (x[0] - 0.5) * (x[0] - 0.5)); };

  std::vector<ValueSlice> slices;
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.1 * k;
    slices.push_back(fill_slice(grid, [&](const Vec& x) { return bump(x) * std::max(0.0, 0.5 - t); }, t));
  }
  const ValueSlice z = fill_slice(grid, [](const Vec&) { return 0.0; });

  const CoincidenceReport rep = detect_coincidence(slices, grid, z, 0.01);
  CHECK_FALSE(rep.censored);
  CHECK(rep.global_t == doctest::Approx(0.5).epsilon(1e-12));

  // tightening the tolerance can only delay coincidence
  const CoincidenceReport tight = detect_coincidence(slices, grid, z, 1e-4);
  CHECK(tight.global_t >= rep.global_t - 1e-12);

  // a node that never settles censors the report
  std::vector<ValueSlice> stuck = slices;
  for (ValueSlice& s : stuck) s.values[grid.interior_nodes()[0]] = 0.2;
  const CoincidenceReport bad = detect_coincidence(stuck, grid, z, 0.01);
  CHECK(bad.censored);
  CHECK(bad.censored_nodes >= 1);
  CHECK(std::isinf(bad.global_t));
}

TEST_CASE("one sided coincidence distinguishes the approach direction") {
  const Domain dom = Domain::ball(Vec{0.5}, 0.5);
  const Grid grid = build_grid(dom, 0.05, 0.1);
  const ValueSlice z = fill_slice(grid, [](const Vec&) { return 0.0; });
  std::vector<ValueSlice> slices;
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.2 * k;
    // u stays strictly below z and creeps up
    slices.push_back(fill_slice(grid, [&](const Vec& x) {
      return -0.3 * std::exp(-t) * std::max(0.1, std::sin(kPi * x[0]));
    }, t));
  }
  const CoincidenceReport below = one_sided_coincidence(slices, grid, z, 0.05, Side::Below);
  CHECK(below.global_t == doctest::Approx(0.0));
  const CoincidenceReport above = one_sided_coincidence(slices, grid, z, 0.05, Side::Above);
  CHECK(above.global_t > 0.5);
  CHECK_FALSE(above.censored);
}

TEST_CASE("halfspace buckets are monotone for a plane-driven gap") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const Grid grid = build_grid(dom, 0.1, 0.2);
  const ValueSlice z = fill_slice(grid, [](const Vec&) { return 0.0; });
  std::vector<ValueSlice> slices;
  for (int k = 0; k <= 12; ++k) {
    const double t = 0.05 * k;
    slices.push_back(fill_slice(grid, [&](const Vec& x) {
      const double wait = 0.5 - 0.4 * std::min(1.0, std::max(0.0, x[0]));
      return std::max(0.0, wait - t);
    }, t));
  }
  const HalfspaceReport rep =
      halfspace_coincidence(slices, grid, z, 1e-3, Side::Below, Vec{1.0, 0.0}, 0.0, 6);
  CHECK(rep.base.censored_nodes == 0);
  CHECK(rep.monotonicity_violations == 0);
  REQUIRE(rep.buckets.size() >= 2);
  CHECK(rep.buckets.front().max_t_star >= rep.buckets.back().max_t_star - 1e-12);
}

TEST_CASE("halfspace pipeline settles on a small disk") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 0.6);
  const Affine pi{Vec{0.3, 0.0}, 0.0};
  DppConfig cfg;
  cfg.epsilon = 0.2;
  cfg.h = 0.1;
  cfg.j = 1;
  cfg.horizon = 2.0;
  cfg.resolution = 16;
  const HalfspaceReport rep = halfspace_scenario(dom, pi, Vec{1.0, 0.0}, 0.0, cfg);
  CHECK(rep.base.censored_nodes == 0);
  CHECK(rep.base.global_t < 2.0);
  CHECK_THROWS(halfspace_scenario(dom, pi, Vec{0.0, 0.0}, 0.0, cfg));
}

TEST_CASE("sandwich amplitudes fitted at one level bound the later ones") {
  const Domain dom = Domain::ball(Vec{0.5}, 0.5);
  const Grid grid = build_grid(dom, 0.05, 0.1);
  const auto dome = [](const Vec& x) { return std::max(1e-6, std::sin(kPi * x[0])); };

  EigenEstimate enclosing{build_grid(dom, 0.05, 0.1), 2.0, fill_slice(grid, dome), true, 0, {}, ""};

  const ValueSlice z = fill_slice(grid, [](const Vec&) { return 0.25; });
  const auto amp = [](const Vec& x) { return x[0] > 0.5 ? 0.8 : -0.5; };
  std::vector<ValueSlice> slices;
  for (int k = 0; k <= 20; ++k) {
    const double t = 0.05 * k;
    slices.push_back(fill_slice(grid, [&](const Vec& x) {
      return 0.25 + amp(x) * std::exp(-2.0 * t) * dome(x);
    }, t));
  }
  const SandwichReport rep = sandwich_check(slices, grid, z, enclosing, 2, 1e-9);
  CHECK(rep.ok);
  CHECK(rep.violations == 0);
  CHECK(rep.c_upper == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(rep.c_lower == doctest::Approx(0.5).epsilon(1e-9));

  // a late bump outside the cone is caught
  std::vector<ValueSlice> bad = slices;
  bad.back().values[grid.interior_nodes()[grid.interior_nodes().size() / 2]] += 0.3;
  const SandwichReport caught = sandwich_check(bad, grid, z, enclosing, 2, 1e-9);
  CHECK(caught.violations >= 1);
  // 0.3 minus the -0.5 branch contribution, less the 0.8-side allowance
  CHECK(caught.max_overshoot > 0.1);
}
