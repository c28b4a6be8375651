#include "eigenflow/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eigenflow {

namespace {
constexpr double kFpSlack = 1e-9;
}

Grid::Grid(Domain domain, double h, double epsilon)
    : domain_(std::move(domain)), h_(h), epsilon_(epsilon) {
  const int n = domain_.dim();
  if (!(h > 0.0)) throw std::invalid_argument("build_grid: h must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_grid: epsilon must be positive");
  if (h > epsilon + 1e-15)
    throw std::invalid_argument("build_grid: require h <= epsilon (got h=" + std::to_string(h) +
                                ", epsilon=" + std::to_string(epsilon) + ")");

  halo_width_ = std::max(epsilon_, h_ * std::sqrt(static_cast<double>(n)));

  // Symmetric extent around the anchor: cover the bounding box plus the halo
  // plus one cell of margin, so every interpolation stencil near the layer has
  // in-grid corners.
  const BBox box = domain_.bounding_box();
  const Vec anchor = domain_.anchor();
  extent_.resize(n);
  stride_.resize(n);
  origin_ = Vec(n);
  for (int i = 0; i < n; ++i) {
    const double reach =
        std::max(box.hi[i] - anchor[i], anchor[i] - box.lo[i]) + halo_width_ + h_;
    const int half = static_cast<int>(std::ceil(reach / h_ - kFpSlack));
    extent_[i] = 2 * half + 1;
    origin_[i] = anchor[i] - h_ * half;
  }
  total_ = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride_[i] = total_;
    total_ *= static_cast<std::size_t>(extent_[i]);
  }

  cls_.assign(total_, NodeClass::Far);
  valued_.assign(total_, 0);
  for (std::size_t id = 0; id < total_; ++id) {
    const Vec x = point(id);
    // A node inside by less than the margin behaves as a boundary point and
    // belongs with the strip, whatever the rounding of its coordinates says.
    if (domain_.inside_by_margin(x)) {
      cls_[id] = NodeClass::Interior;
      valued_[id] = 1;
      interior_.push_back(id);
      continue;
    }
    const double d = domain_.exterior_distance(x);
    if (d <= epsilon_ + kFpSlack) {
      cls_[id] = NodeClass::Strip;
      valued_[id] = 1;
      strip_.push_back(id);
      layer_.push_back(id);
    } else if (d <= halo_width_ + kFpSlack) {
      valued_[id] = 1;  // halo: carries boundary values, classifies as Far
      layer_.push_back(id);
    }
  }
  if (interior_.empty())
    throw std::invalid_argument("build_grid: no interior nodes; h too coarse for this domain");
}

std::size_t Grid::index_of(const std::vector<int>& multi) const {
  std::size_t id = 0;
  for (int i = 0; i < dim(); ++i) id += stride_[i] * static_cast<std::size_t>(multi[i]);
  return id;
}

Vec Grid::point(std::size_t id) const {
  const int n = dim();
  Vec x(n);
  for (int i = 0; i < n; ++i) {
    const std::size_t k = (id / stride_[i]) % static_cast<std::size_t>(extent_[i]);
    x[i] = origin_[i] + h_ * static_cast<double>(k);
  }
  return x;
}

bool Grid::shift(std::size_t id, const std::vector<int>& steps, std::size_t& out) const {
  std::size_t res = id;
  for (int i = 0; i < dim(); ++i) {
    const int k = static_cast<int>((id / stride_[i]) % static_cast<std::size_t>(extent_[i]));
    const int kk = k + steps[i];
    if (kk < 0 || kk >= extent_[i]) return false;
    res += stride_[i] * static_cast<std::size_t>(steps[i]);
  }
  out = res;
  return true;
}

bool Grid::covers(const Vec& x) const {
  for (int i = 0; i < dim(); ++i) {
    const double u = (x[i] - origin_[i]) / h_;
    if (u < -kFpSlack || u > static_cast<double>(extent_[i] - 1) + kFpSlack) return false;
  }
  return true;
}

void Grid::cell(const Vec& x, std::size_t corners[], double weights[]) const {
  const int n = dim();
  std::size_t base = 0;
  double frac[kMaxDim];
  for (int i = 0; i < n; ++i) {
    double u = (x[i] - origin_[i]) / h_;
    // Clamp fp jitter at the box edge; genuine out-of-coverage is a caller bug.
    if (u < 0.0) {
      if (u < -kFpSlack) throw std::logic_error("Grid::cell: point outside grid coverage");
      u = 0.0;
    }
    const double limit = static_cast<double>(extent_[i] - 1);
    if (u > limit) {
      if (u > limit + kFpSlack) throw std::logic_error("Grid::cell: point outside grid coverage");
      u = limit;
    }
    int k = static_cast<int>(u);
    if (k > extent_[i] - 2) k = extent_[i] - 2;
    base += stride_[i] * static_cast<std::size_t>(k);
    frac[i] = u - static_cast<double>(k);
  }
  const int m = 1 << n;
  for (int corner = 0; corner < m; ++corner) {
    std::size_t id = base;
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      if (corner >> i & 1) {
        id += stride_[i];
        w *= frac[i];
      } else {
        w *= 1.0 - frac[i];
      }
    }
    corners[corner] = id;
    weights[corner] = w;
  }
}

Grid build_grid(const Domain& domain, double h, double epsilon) {
  return Grid(domain, h, epsilon);
}

double interpolate(const ValueSlice& slice, const Grid& grid, const Vec& x) {
  if (slice.values.size() != grid.node_count())
    throw std::invalid_argument("interpolate: slice does not match grid");
  const int m = 1 << grid.dim();
  std::size_t corners[1 << kMaxDim];
  double weights[1 << kMaxDim];
  grid.cell(x, corners, weights);
  double acc = 0.0;
  for (int c = 0; c < m; ++c) {
    if (weights[c] == 0.0) continue;  // on-lattice queries may graze unvalued corners
    const double v = slice.values[corners[c]];
    if (std::isnan(v))
      throw std::logic_error("interpolate: stencil touches a node that carries no value");
    acc += weights[c] * v;
  }
  return acc;
}

}  // namespace eigenflow
