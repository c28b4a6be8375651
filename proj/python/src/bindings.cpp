#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigenflow/asymptotics.hpp"
#include "eigenflow/dpp.hpp"
#include "eigenflow/domain.hpp"
#include "eigenflow/envelope.hpp"
#include "eigenflow/scenario.hpp"

namespace py = pybind11;
using namespace eigenflow;

namespace {

Vec to_vec(const std::vector<double>& v) {
  if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("point must have 1 to 6 coordinates");
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

py::tuple vec_tuple(const Vec& v) {
  py::tuple t(v.dim());
  for (int i = 0; i < v.dim(); ++i) t[i] = v[i];
  return t;
}

// Python callables are held through a shared_ptr so the std::function copies
// the solver makes never touch the reference count off the GIL; each actual
// call re-acquires the GIL because solvers run with it released (and may
// evaluate payoffs from worker threads).
std::function<double(const Vec&, double)> wrap_gt(const py::function& f) {
  auto keep = std::make_shared<py::function>(f);
  return [keep](const Vec& x, double t) {
    py::gil_scoped_acquire gil;
    return (*keep)(vec_tuple(x), t).cast<double>();
  };
}

std::function<double(const Vec&)> wrap_g(const py::function& f) {
  auto keep = std::make_shared<py::function>(f);
  return [keep](const Vec& x) {
    py::gil_scoped_acquire gil;
    return (*keep)(vec_tuple(x)).cast<double>();
  };
}

py::list grid_points(const Grid& grid) {
  py::list pts;
  for (std::size_t id = 0; id < grid.node_count(); ++id) pts.append(vec_tuple(grid.point(id)));
  return pts;
}

py::list interior_ids(const Grid& grid) {
  py::list ids;
  for (std::size_t id : grid.interior_nodes()) ids.append(id);
  return ids;
}

py::list slice_values(const ValueSlice& s) {
  py::list row;
  for (double v : s.values) row.append(v);
  return row;
}

DppConfig make_config(double epsilon, double h, int j, double horizon, int resolution,
                      std::uint64_t seed, int keep_every) {
  DppConfig cfg;
  cfg.epsilon = epsilon;
  cfg.h = h;
  cfg.j = j;
  cfg.horizon = horizon;
  cfg.resolution = resolution;
  cfg.seed = seed;
  cfg.keep_every = keep_every;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_eigenflow, m) {
  m.doc() = "Solvers for the evolution driven by the j-th smallest Hessian eigenvalue";
  m.attr("__version__") = version_string();

  py::class_<Domain>(m, "Domain")
      .def_property_readonly("dim", &Domain::dim)
      .def_property_readonly("anchor", [](const Domain& d) { return vec_tuple(d.anchor()); })
      .def("inside", [](const Domain& d, const std::vector<double>& x) { return d.inside(to_vec(x)); },
           py::arg("x"))
      .def("exterior_distance",
           [](const Domain& d, const std::vector<double>& x) { return d.exterior_distance(to_vec(x)); },
           py::arg("x"))
      .def("project",
           [](const Domain& d, const std::vector<double>& x) { return vec_tuple(d.project(to_vec(x))); },
           py::arg("x"))
      .def("enclosing_radius", &Domain::enclosing_radius)
      .def("inscribed_radius", &Domain::inscribed_radius)
      .def("__repr__", [](const Domain& d) {
        return std::string("<Domain ") + d.kind_name() + " dim=" + std::to_string(d.dim()) + ">";
      });

  m.def("ball",
        [](const std::vector<double>& center, double radius) {
          return Domain::ball(to_vec(center), radius);
        },
        py::arg("center"), py::arg("radius"));
  m.def("ellipsoid",
        [](const std::vector<double>& center, const std::vector<double>& semi_axes) {
          return Domain::ellipsoid(to_vec(center), to_vec(semi_axes));
        },
        py::arg("center"), py::arg("semi_axes"));
  m.def("ball_intersection",
        [](const std::vector<std::vector<double>>& centers, const std::vector<double>& radii) {
          std::vector<Vec> cs;
          cs.reserve(centers.size());
          for (const auto& c : centers) cs.push_back(to_vec(c));
          return Domain::ball_intersection(cs, radii);
        },
        py::arg("centers"), py::arg("radii"));

  m.def(
      "solve_parabolic",
      [](const Domain& domain, const py::function& g, const py::function& u0, double epsilon,
         double h, int j, double horizon, int resolution, std::uint64_t seed, int keep_every) {
        PayoffData data;
        data.g = wrap_gt(g);
        data.u0 = wrap_g(u0);
        const DppConfig cfg = make_config(epsilon, h, j, horizon, resolution, seed, keep_every);
        ParabolicResult res = [&] {
          py::gil_scoped_release release;
          return solve_parabolic(domain, data, cfg);
        }();
        py::dict out;
        out["h"] = res.grid.spacing();
        out["points"] = grid_points(res.grid);
        out["interior"] = interior_ids(res.grid);
        py::list times, values;
        for (const ValueSlice& s : res.slices) {
          times.append(s.time);
          values.append(slice_values(s));
        }
        out["times"] = times;
        out["values"] = values;
        return out;
      },
      py::arg("domain"), py::arg("g"), py::arg("u0"), py::kw_only(), py::arg("epsilon"),
      py::arg("h"), py::arg("j") = 1, py::arg("horizon") = 1.0, py::arg("resolution") = 90,
      py::arg("seed") = 1, py::arg("keep_every") = 1,
      "Time-dependent value iteration from u0 with exterior data g(x, t); returns the "
      "stored levels, every grid node, and the interior node ids.");

  m.def(
      "solve_elliptic",
      [](const Domain& domain, const py::function& g, double epsilon, double h, int j,
         int resolution, std::uint64_t seed, double tol, int max_sweeps, double initial_guess) {
        const auto gf = wrap_g(g);
        DppConfig cfg = make_config(epsilon, h, j, 1.0, resolution, seed, 1);
        cfg.fixed_point_tol = tol;
        cfg.max_sweeps = max_sweeps;
        EllipticResult res = [&] {
          py::gil_scoped_release release;
          return solve_elliptic(domain, gf, cfg, initial_guess);
        }();
        py::dict out;
        out["h"] = res.grid.spacing();
        out["points"] = grid_points(res.grid);
        out["interior"] = interior_ids(res.grid);
        out["value"] = slice_values(res.value);
        out["sweeps"] = res.sweeps;
        out["residual"] = res.residual;
        out["converged"] = res.converged;
        return out;
      },
      py::arg("domain"), py::arg("g"), py::kw_only(), py::arg("epsilon"), py::arg("h"),
      py::arg("j") = 1, py::arg("resolution") = 90, py::arg("seed") = 1, py::arg("tol") = 1e-6,
      py::arg("max_sweeps") = 60000, py::arg("initial_guess") = 0.0,
      "Stationary value with exterior data g(x), iterated to a fixed point.");

  m.def(
      "boundary_envelope_value",
      [](const Domain& domain, const py::function& g, const std::vector<double>& x,
         double spacing, bool concave) {
        const auto gf = wrap_g(g);
        const Vec p = to_vec(x);
        py::gil_scoped_release release;
        const std::function<double(const Vec&)> datum =
            concave ? std::function<double(const Vec&)>([&gf](const Vec& y) { return -gf(y); })
                    : gf;
        const double v = convex_envelope_at(sample_boundary(domain, datum, spacing), p);
        return concave ? -v : v;
      },
      py::arg("domain"), py::arg("g"), py::arg("x"), py::kw_only(), py::arg("spacing") = 0.05,
      py::arg("concave") = false,
      "Convex (or concave) envelope of the boundary datum g, evaluated at one point.");

  m.def(
      "estimate_principal_eigenvalue",
      [](const Domain& domain, double epsilon, double h, const std::string& mode, int resolution,
         std::uint64_t seed) {
        EigenMode em;
        if (mode == "largest")
          em = EigenMode::Largest;
        else if (mode == "smallest")
          em = EigenMode::Smallest;
        else
          throw std::invalid_argument("mode must be 'largest' or 'smallest'");
        const DppConfig cfg = make_config(epsilon, h, 1, 1.0, resolution, seed, 1);
        EigenEstimate est = [&] {
          py::gil_scoped_release release;
          return estimate_principal_eigenvalue(domain, em, cfg);
        }();
        py::dict out;
        out["mu"] = est.mu;
        out["converged"] = est.converged;
        out["iterations"] = est.iterations;
        out["note"] = est.note;
        out["points"] = grid_points(est.grid);
        out["interior"] = interior_ids(est.grid);
        out["profile"] = slice_values(est.profile);
        return out;
      },
      py::arg("domain"), py::kw_only(), py::arg("epsilon"), py::arg("h"),
      py::arg("mode") = "largest", py::arg("resolution") = 90, py::arg("seed") = 1,
      "Principal eigenvalue of the normalized evolution with zero boundary data.");

  m.def(
      "run_scenario",
      [](const std::string& name, const std::string& out_dir, const std::string& config,
         std::uint64_t seed, int levels) {
        ScenarioResult res = [&] {
          py::gil_scoped_release release;
          return run_scenario(name, config, out_dir, seed, levels);
        }();
        py::dict out;
        out["exit_code"] = res.exit_code;
        out["message"] = res.message;
        py::list checks;
        for (const CheckResult& c : res.checks) {
          py::dict d;
          d["name"] = c.name;
          d["passed"] = c.passed;
          d["measured"] = c.measured;
          d["threshold"] = c.threshold;
          d["detail"] = c.detail;
          checks.append(d);
        }
        out["checks"] = checks;
        return out;
      },
      py::arg("name"), py::kw_only(), py::arg("out_dir"), py::arg("config") = "",
      py::arg("seed") = 1, py::arg("levels") = 0,
      "Run one named experiment end to end, writing artifacts into out_dir.");

  m.def("scenario_names", [] { return scenario_names(); },
        "Scenario names accepted by run_scenario, in release order.");
}
