#pragma once

#include <array>
#include <vector>

#include "eigenflow/rng.hpp"
#include "eigenflow/vec.hpp"

namespace eigenflow {

/// Dense symmetric matrix, dimension <= 6. Stored full; symmetry is enforced
/// by construction (set writes both triangles).
class SymMatrix {
 public:
  SymMatrix() : n_(0) {}
  explicit SymMatrix(int n);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(const Vec& d);
  /// Symmetric matrix with independent Gaussian entries (GOE-style scaling is
  /// not needed here; plain unit Gaussians).
  static SymMatrix random(int n, Rng& rng);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return a_[idx(i, j)]; }
  void set(int i, int j, double v) {
    a_[idx(i, j)] = v;
    a_[idx(j, i)] = v;
  }

  SymMatrix& operator+=(const SymMatrix& o);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(const SymMatrix& a);
  SymMatrix& operator*=(double s);
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  Vec apply(const Vec& x) const;
  double quad(const Vec& x) const;  // <Ax, x>
  double frobenius() const;
  double max_abs() const;

 private:
  int idx(int i, int j) const { return i * n_ + j; }
  std::array<double, kMaxDim * kMaxDim> a_{};
  int n_;
};

struct EigenDecomposition {
  Vec values;                    // ascending
  std::vector<Vec> vectors;      // vectors[k] pairs with values[k]
};

/// All eigenvalues in ascending order, by the cyclic Jacobi rotation method
/// run to off-diagonal exhaustion. Residuals ||Av - lambda v|| stay below
/// 1e-10 * ||A||.
Vec eigenvalues_sym(const SymMatrix& a);

/// Eigenvalues and an orthonormal eigenbasis (accumulated rotations).
EigenDecomposition eigen_sym(const SymMatrix& a);

/// j-th smallest eigenvalue, 1-based: lambda_1 is the minimum, lambda_N the
/// maximum. Throws unless 1 <= j <= N.
double lambda_j(const SymMatrix& a, int j);

}  // namespace eigenflow
