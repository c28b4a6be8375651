#include "eigenflow/envelope.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "eigenflow/parallel.hpp"

namespace eigenflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_low_dim(int dim, const char* what) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument(std::string(what) +
                                ": brute-force envelopes support dimensions 1..3, got " +
                                std::to_string(dim));
}

/// Fibonacci lattice on the upper half sphere (z > 0) in R^3.
std::vector<Vec> fibonacci_half_sphere(int count) {
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int k = 0; k < count; ++k) {
    const double z = (k + 0.5) / static_cast<double>(count);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * kPi * (k / golden - std::floor(k / golden));
    dirs.push_back(Vec{rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return dirs;
}

/// Barycentric weights of `x` over the subset `idx[0..s)`; least squares when
/// the subset is smaller than dim+1. Returns false if the system is singular,
/// a weight drops below -lam_tol, or the residual exceeds res_tol.
bool solve_combination(const std::vector<BoundarySample>& samples, const int* idx, int s,
                       const Vec& x, double lam_tol, double res_tol, double* combo_value,
                       double* residual) {
  const int n = x.dim();
  const int rows = n + 1;
  double a[4][4];  // rows x s: coordinates stacked over a row of ones
  double b[4];
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < s; ++c) a[r][c] = samples[static_cast<std::size_t>(idx[c])].point[r];
    b[r] = x[r];
  }
  for (int c = 0; c < s; ++c) a[n][c] = 1.0;
  b[n] = 1.0;

  double m[4][5];  // s x (s+1) augmented working system
  if (s == rows) {
    for (int r = 0; r < s; ++r) {
      for (int c = 0; c < s; ++c) m[r][c] = a[r][c];
      m[r][s] = b[r];
    }
  } else {
    // Normal equations A^T A lam = A^T b; the true residual is checked below.
    for (int r = 0; r < s; ++r) {
      for (int c = 0; c < s; ++c) {
        double acc = 0.0;
        for (int k = 0; k < rows; ++k) acc += a[k][r] * a[k][c];
        m[r][c] = acc;
      }
      double acc = 0.0;
      for (int k = 0; k < rows; ++k) acc += a[k][r] * b[k];
      m[r][s] = acc;
    }
  }

  for (int col = 0; col < s; ++col) {
    int piv = col;
    for (int r = col + 1; r < s; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-13) return false;
    if (piv != col)
      for (int c = col; c <= s; ++c) std::swap(m[piv][c], m[col][c]);
    for (int r = col + 1; r < s; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c <= s; ++c) m[r][c] -= f * m[col][c];
    }
  }
  double lam[4];
  for (int r = s - 1; r >= 0; --r) {
    double acc = m[r][s];
    for (int c = r + 1; c < s; ++c) acc -= m[r][c] * lam[c];
    lam[r] = acc / m[r][r];
  }

  double value = 0.0;
  for (int c = 0; c < s; ++c) {
    if (lam[c] < -lam_tol) return false;
    value += lam[c] * samples[static_cast<std::size_t>(idx[c])].value;
  }
  double res = 0.0;
  for (int r = 0; r < rows; ++r) {
    double acc = -b[r];
    for (int c = 0; c < s; ++c) acc += a[r][c] * lam[c];
    res = std::max(res, std::abs(acc));
  }
  if (res > res_tol) return false;
  *combo_value = value;
  *residual = res;
  return true;
}

/// Exhaustive Caratheodory search over subsets of at most dim+1 samples.
/// Enumeration runs over indices sorted by ascending value, so once the
/// smallest value in a candidate subset cannot beat the incumbent the whole
/// remaining tail is pruned. Returns false when x is not representable at
/// these tolerances.
bool envelope_value(const std::vector<BoundarySample>& samples, const std::vector<int>& order,
                    const Vec& x, double lam_tol, double res_tol, double* out_value,
                    double* out_residual) {
  const int n = x.dim();
  const int count = static_cast<int>(samples.size());
  double best = std::numeric_limits<double>::infinity();
  double best_res = 0.0;
  bool found = false;

  for (int i = 0; i < count; ++i) {
    const BoundarySample& smp = samples[static_cast<std::size_t>(i)];
    double d = 0.0;
    for (int r = 0; r < n; ++r) d = std::max(d, std::abs(smp.point[r] - x[r]));
    if (d <= res_tol && smp.value < best) {
      best = smp.value;
      best_res = d;
      found = true;
    }
  }

  int pos[4];
  int idx[4];
  for (int s = 2; s <= n + 1; ++s) {
    if (count < s) break;
    for (int c = 0; c < s; ++c) pos[c] = c;
    while (true) {
      // Any convex combination is at least the smallest participating value,
      // and order is sorted ascending, so pos[0] alone decides the bound.
      if (samples[static_cast<std::size_t>(order[static_cast<std::size_t>(pos[0])])].value >= best)
        break;
      for (int c = 0; c < s; ++c) idx[c] = order[static_cast<std::size_t>(pos[c])];
      double value, res;
      if (solve_combination(samples, idx, s, x, lam_tol, res_tol, &value, &res) && value < best) {
        best = value;
        best_res = res;
        found = true;
      }
      int p = s - 1;
      while (p >= 0 && pos[p] == count - s + p) --p;
      if (p < 0) break;
      ++pos[p];
      for (int c = p + 1; c < s; ++c) pos[c] = pos[c - 1] + 1;
    }
  }
  if (found) {
    *out_value = best;
    *out_residual = best_res;
  }
  return found;
}

std::vector<int> value_order(const std::vector<BoundarySample>& samples) {
  std::vector<int> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&samples](int l, int r) {
    return samples[static_cast<std::size_t>(l)].value < samples[static_cast<std::size_t>(r)].value;
  });
  return order;
}

ValueSlice envelope_on_grid(const Domain& domain, const std::vector<BoundarySample>& samples,
                            const Grid& grid, EnvelopeStats* stats) {
  require_low_dim(domain.dim(), "convex_envelope");
  if (samples.size() < 2) throw std::invalid_argument("convex_envelope: need at least 2 samples");
  if (samples[0].point.dim() != domain.dim())
    throw std::invalid_argument("convex_envelope: sample dimension mismatch");

  // Nodes in the sliver between the sampled polytope and the curved boundary
  // sit outside the hull by at most the chord sag, which is quadratic in the
  // sample spacing. Those get a second pass with a widened residual
  // tolerance; weights stay nonnegative in both passes.
  double min_gap2 = std::numeric_limits<double>::infinity();
  const Vec& p0 = samples[0].point;
  for (std::size_t i = 1; i < std::min<std::size_t>(samples.size(), 17); ++i)
    min_gap2 = std::min(min_gap2, norm2(samples[i].point - p0));
  const double relaxed_tol = std::max(1e-9, 2.0 * min_gap2);

  const std::vector<int> order = value_order(samples);

  ValueSlice slice;
  slice.time = 0.0;
  slice.epsilon = grid.epsilon();
  slice.values.assign(grid.node_count(), std::numeric_limits<double>::quiet_NaN());

  std::atomic<std::size_t> relaxed{0};
  std::vector<double> residuals(grid.interior_nodes().size(), 0.0);
  std::atomic<bool> failed{false};

  const auto& interior = grid.interior_nodes();
  parallel_for(interior.size(), [&](std::size_t i) {
    const Vec x = grid.point(interior[i]);
    double value, res;
    if (envelope_value(samples, order, x, 1e-9, 1e-9, &value, &res)) {
      slice.values[interior[i]] = value;
      residuals[i] = res;
      return;
    }
    if (envelope_value(samples, order, x, 1e-9, relaxed_tol, &value, &res)) {
      slice.values[interior[i]] = value;
      residuals[i] = res;
      relaxed.fetch_add(1, std::memory_order_relaxed);
      return;
    }
    failed.store(true, std::memory_order_relaxed);
  });
  if (failed.load())
    throw std::runtime_error(
        "convex_envelope: an interior node lies outside the sampled hull; boundary sampling is "
        "too coarse for this grid");
  if (stats) {
    stats->relaxed_nodes = relaxed.load();
    stats->max_residual = 0.0;
    for (double r : residuals) stats->max_residual = std::max(stats->max_residual, r);
  }
  return slice;
}

}  // namespace

std::vector<BoundarySample> sample_boundary(const Domain& domain,
                                            const std::function<double(const Vec&)>& g,
                                            double spacing) {
  require_low_dim(domain.dim(), "sample_boundary");
  if (!(spacing > 0.0)) throw std::invalid_argument("sample_boundary: spacing must be positive");
  const int n = domain.dim();
  const Vec c = domain.anchor();
  const double radius = domain.enclosing_radius();

  std::vector<Vec> dirs;
  if (n == 1) {
    dirs = {Vec{1.0}, Vec{-1.0}};
  } else if (n == 2) {
    int m = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * radius / spacing)));
    if (m % 2 != 0) ++m;  // keep antipodal pairing
    dirs.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * kPi * k / static_cast<double>(m);
      dirs.push_back(Vec{std::cos(th), std::sin(th)});
    }
  } else {
    const int half = std::max(
        16, static_cast<int>(std::ceil(2.0 * kPi * radius * radius / (spacing * spacing))));
    dirs = fibonacci_half_sphere(half);
    const std::size_t base = dirs.size();
    for (std::size_t k = 0; k < base; ++k) dirs.push_back(-dirs[k]);
  }

  std::vector<BoundarySample> samples;
  samples.reserve(dirs.size());
  for (const Vec& d : dirs) {
    const double t = domain.ray_to_boundary(c, d);
    const Vec y = c + t * d;
    samples.push_back({y, g(y)});
  }
  return samples;
}

double convex_envelope_at(const std::vector<BoundarySample>& samples, const Vec& x,
                          double feas_tol) {
  require_low_dim(x.dim(), "convex_envelope_at");
  if (samples.empty()) throw std::invalid_argument("convex_envelope_at: no samples");
  const std::vector<int> order = value_order(samples);
  double value, res;
  if (!envelope_value(samples, order, x, feas_tol, feas_tol, &value, &res))
    throw std::runtime_error("convex_envelope_at: point " + x.str() +
                             " is not in the convex hull of the samples");
  return value;
}

ValueSlice convex_envelope(const Domain& domain, const std::vector<BoundarySample>& samples,
                           const Grid& grid, EnvelopeStats* stats) {
  return envelope_on_grid(domain, samples, grid, stats);
}

ValueSlice concave_envelope(const Domain& domain, const std::vector<BoundarySample>& samples,
                            const Grid& grid, EnvelopeStats* stats) {
  std::vector<BoundarySample> negated = samples;
  for (BoundarySample& s : negated) s.value = -s.value;
  ValueSlice slice = envelope_on_grid(domain, negated, grid, stats);
  for (double& v : slice.values)
    if (!std::isnan(v)) v = -v;
  return slice;
}

double directional_envelope_bound(const Domain& domain,
                                  const std::function<double(const Vec&)>& g,
                                  const std::vector<int>& section_axes, const Vec& p, int rays) {
  const int n = domain.dim();
  const int j = static_cast<int>(section_axes.size());
  if (j < 1 || j > n)
    throw std::invalid_argument("directional_envelope_bound: bad section dimension");
  require_low_dim(j, "directional_envelope_bound");
  for (int axis : section_axes)
    if (axis < 0 || axis >= n)
      throw std::invalid_argument("directional_envelope_bound: axis index out of range");
  if (!domain.inside(p))
    throw std::invalid_argument("directional_envelope_bound: empty section, " + p.str() +
                                " is not interior");

  // Directions within the section subspace, in antipodal pairs so that p is
  // always a combination of two opposite boundary hits.
  std::vector<Vec> plane_dirs;  // coordinates in R^j
  if (j == 1) {
    plane_dirs = {Vec{1.0}, Vec{-1.0}};
  } else if (j == 2) {
    int m = std::max(8, rays);
    if (m % 2 != 0) ++m;
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * kPi * k / static_cast<double>(m);
      plane_dirs.push_back(Vec{std::cos(th), std::sin(th)});
    }
  } else {
    plane_dirs = fibonacci_half_sphere(std::max(8, rays / 2));
    const std::size_t base = plane_dirs.size();
    for (std::size_t k = 0; k < base; ++k) plane_dirs.push_back(-plane_dirs[k]);
  }

  std::vector<BoundarySample> section_samples;
  section_samples.reserve(plane_dirs.size());
  for (const Vec& sd : plane_dirs) {
    Vec d = Vec::zero(n);
    for (int axis = 0; axis < j; ++axis) d[section_axes[static_cast<std::size_t>(axis)]] = sd[axis];
    const double t = domain.ray_to_boundary(p, d);
    const Vec y = p + t * d;
    Vec xi = Vec::zero(j);
    for (int axis = 0; axis < j; ++axis) xi[axis] = y[section_axes[static_cast<std::size_t>(axis)]];
    section_samples.push_back({xi, -g(y)});  // negated: concave hull via the convex one
  }

  Vec xi_p = Vec::zero(j);
  for (int axis = 0; axis < j; ++axis) xi_p[axis] = p[section_axes[static_cast<std::size_t>(axis)]];
  return -convex_envelope_at(section_samples, xi_p, 1e-9);
}

}  // namespace eigenflow
