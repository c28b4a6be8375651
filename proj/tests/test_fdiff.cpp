#include <cmath>
#include <limits>

#include "doctest.h"
#include "eigenflow/fdiff.hpp"
#include "eigenflow/rng.hpp"

using namespace eigenflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

ValueSlice slice_from(const Grid& grid, const std::function<double(const Vec&)>& f) {
  ValueSlice s;
  s.values.assign(grid.node_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t id = 0; id < grid.node_count(); ++id)
    if (grid.carries_value(id)) s.values[id] = f(grid.point(id));
  return s;
}

}  // namespace

TEST_CASE("discrete hessian recovers quadratics exactly") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const Grid grid = build_grid(dom, 0.05, 0.1);
  Rng rng(mix_seed({10, 20}));
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix a = SymMatrix::random(2, rng);
    const Vec b{rng.gaussian(), rng.gaussian()};
    const ValueSlice s =
        slice_from(grid, [&](const Vec& x) { return 0.5 * a.quad(x) + dot(b, x); });
    std::uint64_t one_sided = 0;
    for (std::size_t id : grid.interior_nodes()) {
      const SymMatrix h = discrete_hessian(s, grid, id, &one_sided);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          CHECK(h(i, j) == doctest::Approx(a(i, j)).epsilon(1e-7).scale(a.max_abs() + 1.0));
    }
    // the halo guarantees complete stencils for every interior node
    CHECK(one_sided == 0);
  }
}

TEST_CASE("affine data is invariant under the explicit march") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const auto aff = [](const Vec& x) { return 1.5 * x[0] - 0.5 * x[1] + 2.0; };
  PayoffData data;
  data.g = [aff](const Vec& x, double) { return aff(x); };
  data.u0 = aff;
  FdConfig cfg;
  cfg.h = 0.1;
  cfg.horizon = 0.05;
  cfg.j = 1;
  const FdResult run = solve_fd(dom, data, cfg);
  for (const ValueSlice& s : run.slices)
    for (std::size_t id : run.grid.interior_nodes())
      CHECK(s.values[id] == doctest::Approx(aff(run.grid.point(id))).epsilon(1e-11));
}

TEST_CASE("explicit march reproduces the heat solution in 1d") {
  const Domain dom = Domain::ball(Vec{0.5}, 0.5);
  PayoffData data;
  data.g = [](const Vec&, double) { return 0.0; };
  data.u0 = [](const Vec& x) { return std::max(0.0, std::sin(kPi * x[0])); };
  FdConfig cfg;
  cfg.h = 0.025;
  cfg.horizon = 0.5;
  cfg.j = 1;
  const FdResult run = solve_fd(dom, data, cfg);
  const ValueSlice& last = run.slices.back();
  double worst = 0.0;
  for (std::size_t id : run.grid.interior_nodes()) {
    const double x = run.grid.point(id)[0];
    const double exact = std::exp(-kPi * kPi * last.time) * std::sin(kPi * x);
    worst = std::max(worst, std::abs(last.values[id] - exact));
  }
  CHECK(worst <= std::max(0.05, 1.0 * cfg.h));
}

TEST_CASE("time step validation names the key and enforces stability") {
  FdConfig cfg;
  cfg.h = 0.1;
  cfg.dt = 0.004;  // above h^2/(2N) = 0.0025 in 2d
  try {
    cfg.validate(2);
    FAIL("expected a throw");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("solver.dt") != std::string::npos);
  }
  cfg.dt = 0.0;
  CHECK(cfg.effective_dt(2) == doctest::Approx(0.0025));
  CHECK_NOTHROW(cfg.validate(2));
}

TEST_CASE("both solver routes agree on a smooth 2d problem") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const auto f = [](const Vec& x) { return 0.4 * x[0] * x[0] - 0.1 * x[1] + 0.2; };
  PayoffData data;
  data.g = [f](const Vec& x, double) { return f(x); };
  data.u0 = f;

  DppConfig dcfg;
  dcfg.epsilon = 0.1;
  dcfg.h = 0.05;
  dcfg.j = 1;
  dcfg.horizon = 0.1;
  dcfg.resolution = 45;
  const ParabolicResult game_route = solve_parabolic(dom, data, dcfg);

  FdConfig fcfg;
  fcfg.h = 0.05;
  fcfg.horizon = 0.1;
  fcfg.j = 1;
  const FdResult fd_route = solve_fd(dom, data, fcfg);

  // compare the two final slices on deep nodes at matched times
  CHECK(game_route.slices.back().time == doctest::Approx(fd_route.slices.back().time).epsilon(0.05));
  double gap = 0.0;
  for (std::size_t id : fd_route.grid.interior_nodes()) {
    const Vec x = fd_route.grid.point(id);
    if (norm(x) > 0.8) continue;
    gap = std::max(gap, std::abs(fd_route.slices.back().values[id] -
                                 interpolate(game_route.slices.back(), game_route.grid, x)));
  }
  CHECK(gap <= 0.02);
}
