#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace eigenflow {

/// Maximum spatial dimension supported by the library.
inline constexpr int kMaxDim = 6;

/// Small fixed-capacity vector in R^N, N <= 6. Value type, no allocation.
class Vec {
 public:
  Vec() : n_(0) {}
  explicit Vec(int n) : n_(n) { check_dim(n); }
  Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    check_dim(n_);
    int i = 0;
    for (double v : xs) c_[i++] = v;
  }

  static Vec zero(int n) { return Vec(n); }
  static Vec axis(int n, int i) {
    Vec v(n);
    assert(i >= 0 && i < n);
    v.c_[i] = 1.0;
    return v;
  }

  int dim() const { return n_; }
  double operator[](int i) const {
    assert(i >= 0 && i < n_);
    return c_[i];
  }
  double& operator[](int i) {
    assert(i >= 0 && i < n_);
    return c_[i];
  }

  Vec& operator+=(const Vec& o) {
    assert(n_ == o.n_);
    for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    assert(n_ == o.n_);
    for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator-(Vec a) {
    for (int i = 0; i < a.n_; ++i) a.c_[i] = -a.c_[i];
    return a;
  }

  friend double dot(const Vec& a, const Vec& b) {
    assert(a.n_ == b.n_);
    double s = 0.0;
    for (int i = 0; i < a.n_; ++i) s += a.c_[i] * b.c_[i];
    return s;
  }
  friend double norm2(const Vec& a) { return dot(a, a); }
  friend double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < n_; ++i) s += (i ? ", " : "") + std::to_string(c_[i]);
    return s + ")";
  }

 private:
  static void check_dim(int n) {
    if (n < 0 || n > kMaxDim)
      throw std::invalid_argument("Vec: dimension must be in [0, 6], got " + std::to_string(n));
  }
  std::array<double, kMaxDim> c_{};
  int n_;
};

/// Axis-aligned box, used for grid extents.
struct BBox {
  Vec lo;
  Vec hi;
  int dim() const { return lo.dim(); }
};

}  // namespace eigenflow
