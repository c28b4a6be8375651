#include "eigenflow/eig.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eigenflow {

SymMatrix::SymMatrix(int n) : n_(n) {
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("SymMatrix: dimension must be in [1, 6], got " + std::to_string(n));
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(const Vec& d) {
  SymMatrix m(d.dim());
  for (int i = 0; i < d.dim(); ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::random(int n, Rng& rng) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, rng.gaussian());
  return m;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (n_ != o.n_) throw std::invalid_argument("SymMatrix: dimension mismatch in +");
  for (int i = 0; i < n_ * n_; ++i) a_[i] += o.a_[i];
  return *this;
}

SymMatrix operator-(const SymMatrix& a) {
  SymMatrix m = a;
  return m *= -1.0;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (int i = 0; i < n_ * n_; ++i) a_[i] *= s;
  return *this;
}

Vec SymMatrix::apply(const Vec& x) const {
  Vec y(n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += a_[idx(i, j)] * x[j];
    y[i] = s;
  }
  return y;
}

double SymMatrix::quad(const Vec& x) const { return dot(apply(x), x); }

double SymMatrix::frobenius() const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) s += a_[idx(i, j)] * a_[idx(i, j)];
  return std::sqrt(s);
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m = std::max(m, std::fabs(a_[idx(i, j)]));
  return m;
}

namespace {

// Cyclic Jacobi: sweep all upper-triangle pivots, rotating each to zero, until
// the off-diagonal mass is exhausted. Quadratic convergence makes ~15 sweeps
// ample for 6x6 at double precision.
void jacobi(const SymMatrix& in, double d[], double v[], int n, bool want_vectors) {
  double a[kMaxDim][kMaxDim];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = in(i, j);
  if (want_vectors)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v[i * n + j] = (i == j) ? 1.0 : 0.0;

  const double scale = std::max(in.max_abs(), 1e-300);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (std::sqrt(off) <= 1e-14 * scale) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        if (std::fabs(apq) <= 1e-18 * scale) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = a[p][p], aqq = a[q][q];
        a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        a[p][q] = a[q][p] = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = a[p][k] = c * akp - s * akq;
          a[k][q] = a[q][k] = s * akp + c * akq;
        }
        if (want_vectors) {
          for (int k = 0; k < n; ++k) {
            const double vkp = v[k * n + p], vkq = v[k * n + q];
            v[k * n + p] = c * vkp - s * vkq;
            v[k * n + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) d[i] = a[i][i];
}

}  // namespace

Vec eigenvalues_sym(const SymMatrix& a) {
  const int n = a.dim();
  double d[kMaxDim];
  jacobi(a, d, nullptr, n, false);
  std::sort(d, d + n);
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = d[i];
  return out;
}

EigenDecomposition eigen_sym(const SymMatrix& a) {
  const int n = a.dim();
  double d[kMaxDim];
  double v[kMaxDim * kMaxDim];
  jacobi(a, d, v, n, true);

  int order[kMaxDim];
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order, order + n, [&](int i, int j) { return d[i] < d[j]; });

  EigenDecomposition dec;
  dec.values = Vec(n);
  dec.vectors.resize(n, Vec(n));
  for (int k = 0; k < n; ++k) {
    dec.values[k] = d[order[k]];
    for (int i = 0; i < n; ++i) dec.vectors[k][i] = v[i * n + order[k]];
  }
  return dec;
}

double lambda_j(const SymMatrix& a, int j) {
  if (j < 1 || j > a.dim())
    throw std::invalid_argument("lambda_j: index " + std::to_string(j) +
                                " out of range [1, " + std::to_string(a.dim()) + "]");
  return eigenvalues_sym(a)[j - 1];
}

}  // namespace eigenflow
