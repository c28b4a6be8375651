#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "eigenflow/grid.hpp"
#include "eigenflow/payoff.hpp"

using namespace eigenflow;

namespace {

PayoffData linear_data() {
  PayoffData d;
  d.g = [](const Vec& x, double) { return x[0] + 2.0; };
  d.u0 = [](const Vec& x) { return x[0] + 2.0; };
  return d;
}

}  // namespace

TEST_CASE("exit payoff reads u0 at the start and g outside afterwards") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  PayoffData d;
  d.g = [](const Vec&, double t) { return 10.0 + t; };
  d.u0 = [](const Vec&) { return -3.0; };

  CHECK(eval_payoff(d, dom, Vec{0.2, 0.1}, 0.0) == doctest::Approx(-3.0));
  CHECK(eval_payoff(d, dom, Vec{1.4, 0.0}, 0.0) == doctest::Approx(-3.0));
  CHECK(eval_payoff(d, dom, Vec{1.4, 0.0}, 0.5) == doctest::Approx(10.5));
  CHECK_THROWS_AS(eval_payoff(d, dom, Vec{0.2, 0.1}, 0.5), std::logic_error);
  CHECK(d.counters->g_evals == 1);
  CHECK(d.counters->u0_evals == 2);
}

TEST_CASE("a boundary-grazing point counts as boundary, not interior") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  PayoffData d = linear_data();
  const Vec grazing{std::nextafter(1.0, 0.0), 0.0};
  REQUIRE(dom.inside(grazing));
  // strictly inside the open ball by rounding only; must still be served as
  // boundary data rather than tripping the interior-query guard
  CHECK_NOTHROW(eval_payoff(d, dom, grazing, 0.25));
  CHECK(eval_payoff(d, dom, grazing, 0.25) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("compatible data passes the layer check") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const Grid grid = build_grid(dom, 0.05, 0.1);
  PayoffData d = linear_data();
  CHECK_NOTHROW(check_compatibility(d, grid));
}

TEST_CASE("incompatible data is rejected with the offending node named") {
  const Domain dom = Domain::ball(Vec{0.0, 0.0}, 1.0);
  const Grid grid = build_grid(dom, 0.05, 0.1);
  PayoffData d;
  d.g = [](const Vec&, double) { return 0.0; };
  d.u0 = [](const Vec& x) { return x[0] > 1.0 ? 0.5 : 0.0; };
  try {
    check_compatibility(d, grid);
    FAIL("expected a throw");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0.5") != std::string::npos);   // the gap size
    CHECK(msg.find("(") != std::string::npos);     // node coordinates
  }
}

TEST_CASE("compatibility honours the tolerance argument") {
  const Domain dom = Domain::ball(Vec{0.0}, 1.0);
  const Grid grid = build_grid(dom, 0.1, 0.1);
  PayoffData d;
  d.g = [](const Vec&, double) { return 0.0; };
  d.u0 = [](const Vec&) { return 1e-7; };
  CHECK_THROWS(check_compatibility(d, grid));
  CHECK_NOTHROW(check_compatibility(d, grid, 1e-6));
}
