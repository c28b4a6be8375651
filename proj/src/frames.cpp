#include "eigenflow/frames.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "eigenflow/rng.hpp"

namespace eigenflow {

namespace {

constexpr std::uint64_t kDirectionStream = 0xd12ec7104a5ULL;
constexpr std::uint64_t kFrameStream = 0xf4a3e5b2cULL;

// One representative direction per antipodal pair in R^n: coordinate axes
// first, then seeded unit vectors; in R^2 the equally spaced half-circle.
// Lists are nested in `count` (prefix property), which makes refinement
// studies monotone in the resolution parameter.
std::vector<Vec> half_directions(int n, int count, std::uint64_t seed) {
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec{1.0});
    return dirs;
  }
  if (n == 2) {
    dirs.reserve(count);
    for (int i = 0; i < count; ++i) {
      const double a = std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      dirs.push_back(Vec{std::cos(a), std::sin(a)});
    }
    bool has_e2 = false;
    for (const Vec& d : dirs)
      if (std::fabs(d[0]) < 1e-15 && std::fabs(std::fabs(d[1]) - 1.0) < 1e-15) has_e2 = true;
    if (!has_e2) dirs.push_back(Vec{0.0, 1.0});
    return dirs;
  }
  dirs.reserve(static_cast<std::size_t>(n + count));
  for (int i = 0; i < n; ++i) dirs.push_back(Vec::axis(n, i));
  for (int k = 0; k < count; ++k) {
    Rng rng(mix_seed({seed, kDirectionStream, static_cast<std::uint64_t>(n),
                      static_cast<std::uint64_t>(k)}));
    dirs.push_back(rng.unit_vector(n));
  }
  return dirs;
}

std::vector<Vec> sphere_half_samples(int j, int resolution, std::uint64_t seed) {
  if (j == 1) return {Vec{1.0}};
  if (j == 2) {
    // resolution equally spaced angles over the full circle, stored as the
    // first half (the rest are antipodes); rounded up to an even count.
    const int m = resolution + (resolution & 1);
    std::vector<Vec> half;
    half.reserve(m / 2);
    for (int i = 0; i < m / 2; ++i) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
      half.push_back(Vec{std::cos(a), std::sin(a)});
    }
    return half;
  }
  return half_directions(j, resolution, mix_seed({seed, 0x5a3bULL, static_cast<std::uint64_t>(j)}));
}

// Orthonormal j-frame from seeded Gaussian draws; a draw nearly inside the
// span so far is rejected and redrawn.
std::vector<Vec> sampled_frame(int n, int j, Rng& rng) {
  std::vector<Vec> frame;
  frame.reserve(j);
  while (static_cast<int>(frame.size()) < j) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
    for (const Vec& u : frame) v -= dot(v, u) * u;
    const double len = norm(v);
    if (len < 1e-6) continue;
    frame.push_back((1.0 / len) * v);
  }
  return frame;
}

void append_coordinate_frames(int n, int j, std::vector<std::vector<Vec>>& out) {
  // All C(n, j) axis subsets in lexicographic order.
  std::vector<int> pick(j);
  for (int i = 0; i < j; ++i) pick[i] = i;
  while (true) {
    std::vector<Vec> frame;
    frame.reserve(j);
    for (int i : pick) frame.push_back(Vec::axis(n, i));
    out.push_back(std::move(frame));
    int i = j - 1;
    while (i >= 0 && pick[i] == n - j + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < j; ++k) pick[k] = pick[k - 1] + 1;
  }
}

}  // namespace

Vec FrameSet::ambient(std::size_t f, const Vec& s) const {
  const std::vector<Vec>& frame = frames[f];
  Vec v = s[0] * frame[0];
  for (int l = 1; l < j; ++l) v += s[l] * frame[l];
  return v;
}

std::vector<Vec> FrameSet::sphere_full() const {
  std::vector<Vec> full = sphere_half;
  full.reserve(2 * sphere_half.size());
  for (const Vec& v : sphere_half) full.push_back(-v);
  return full;
}

FrameSet FrameSet::coordinate_frames(int dim, int j, int sphere_resolution, std::uint64_t seed) {
  FrameSet fs;
  fs.dim = dim;
  fs.j = j;
  fs.resolution = sphere_resolution;
  fs.seed = seed;
  if (j == dim) {
    std::vector<Vec> frame;
    for (int i = 0; i < dim; ++i) frame.push_back(Vec::axis(dim, i));
    fs.frames.push_back(std::move(frame));
  } else {
    append_coordinate_frames(dim, j, fs.frames);
  }
  fs.sphere_half = sphere_half_samples(j, sphere_resolution, seed);
  return fs;
}

FrameSet generate_frames(int dim, int j, int resolution, std::uint64_t seed) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("generate_frames: dim must be in [1, 6]");
  if (j < 1 || j > dim)
    throw std::invalid_argument("generate_frames: subspace index " + std::to_string(j) +
                                " out of range [1, " + std::to_string(dim) + "]");
  if (resolution < 1) throw std::invalid_argument("generate_frames: resolution must be >= 1");

  FrameSet fs;
  fs.dim = dim;
  fs.j = j;
  fs.resolution = resolution;
  fs.seed = seed;

  if (j == dim) {
    std::vector<Vec> frame;
    for (int i = 0; i < dim; ++i) frame.push_back(Vec::axis(dim, i));
    fs.frames.push_back(std::move(frame));
    // In R^2 the full sample list is `resolution` equally spaced angles; in
    // higher dimension it reuses the j=1 direction list at equal resolution,
    // which makes the j=1 / j=N index swap structurally exact.
    fs.sphere_half = (dim >= 3) ? half_directions(dim, resolution, seed)
                                : sphere_half_samples(dim, resolution, seed);
    return fs;
  }

  if (j == 1) {
    for (const Vec& d : half_directions(dim, resolution, seed)) fs.frames.push_back({d});
    fs.sphere_half = {Vec{1.0}};
    return fs;
  }

  append_coordinate_frames(dim, j, fs.frames);
  for (int f = 0; f < resolution; ++f) {
    Rng rng(mix_seed({seed, kFrameStream, static_cast<std::uint64_t>(dim),
                      static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(f)}));
    fs.frames.push_back(sampled_frame(dim, j, rng));
  }
  fs.sphere_half = sphere_half_samples(j, resolution, seed);
  return fs;
}

double courant_fischer(const SymMatrix& a, int j, const FrameSet& frames) {
  if (frames.dim != a.dim())
    throw std::invalid_argument("courant_fischer: frame dimension does not match the matrix");
  if (j != frames.j)
    throw std::invalid_argument("courant_fischer: index " + std::to_string(j) +
                                " does not match the frame set (j=" + std::to_string(frames.j) + ")");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < frames.frame_count(); ++f) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vec& s : frames.sphere_half) {
      const double q = a.quad(frames.ambient(f, s));
      if (q > worst) worst = q;
    }
    if (worst < best) best = worst;
  }
  return best;
}

}  // namespace eigenflow
