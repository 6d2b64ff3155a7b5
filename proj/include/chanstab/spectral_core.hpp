#pragma once

// Chebyshev collocation in the wall-normal direction y in [-1, 1].
//
// Nodes are Chebyshev-Gauss-Lobatto points y_j = cos(j pi / n), ordered from +1
// down to -1. Integrals use Clenshaw-Curtis weights, so all L2 quantities are
// plain (unweighted) L2(-1, 1) norms.

#include <complex>
#include <memory>

#include <Eigen/Dense>

namespace chanstab {

using Complex = std::complex<double>;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

/// Collocation grid of polynomial degree n (n + 1 nodes). Cheap to copy: the
/// nodes, weights and differentiation matrices are shared and immutable.
class ChebyshevGrid {
 public:
  explicit ChebyshevGrid(int n);

  int degree() const noexcept { return data_->n; }
  int size() const noexcept { return data_->n + 1; }
  const RVector& nodes() const noexcept { return data_->nodes; }
  const RVector& weights() const noexcept { return data_->weights; }
  const RMatrix& d1() const noexcept { return data_->d1; }
  const RMatrix& d2() const noexcept { return data_->d2; }

  /// Indices 1..n-1 as a contiguous block (boundary rows are 0 and n).
  int interior_size() const noexcept { return data_->n - 1; }

  friend bool operator==(const ChebyshevGrid& a, const ChebyshevGrid& b) {
    return a.degree() == b.degree();
  }

 private:
  struct Data {
    int n;
    RVector nodes;
    RVector weights;
    RMatrix d1;
    RMatrix d2;
  };
  std::shared_ptr<const Data> data_;
};

struct DiffOp {
  int order;
  RMatrix matrix;

  CVector apply(const CVector& f) const { return matrix * f; }
};

/// One Fourier mode in x: complex profile sampled at the grid nodes.
struct FieldMode {
  int k = 0;
  CVector values;
};

/// n must be even and >= 8.
ChebyshevGrid build_grid(int n);

/// order is 1 or 2; the order-2 matrix is the square of the order-1 matrix.
DiffOp diff_matrix(const ChebyshevGrid& grid, int order);

/// <f, g> = sum_j w_j f_j conj(g_j), the quadrature form of the L2(-1,1) pairing.
Complex inner_product(const FieldMode& f, const FieldMode& g, const ChebyshevGrid& grid);
Complex inner_product(const CVector& f, const CVector& g, const ChebyshevGrid& grid);

double l2_norm(const CVector& f, const ChebyshevGrid& grid);

/// Dirichlet solver for (d_yy - k^2) u = f with u(+-1) = 0. The LU factorization
/// is computed once; solve() overwrites the boundary entries of the right side.
class HelmholtzSolver {
 public:
  HelmholtzSolver(const ChebyshevGrid& grid, int k);

  int k() const noexcept { return k_; }
  CVector solve(const CVector& f) const;

  /// Dense inverse of the boundary-bordered matrix. Column j (interior j) is the
  /// response to a unit source at node j; boundary columns map boundary data.
  const RMatrix& inverse() const noexcept { return inverse_; }

 private:
  int k_;
  RMatrix inverse_;
};

FieldMode solve_helmholtz(const ChebyshevGrid& grid, int k, const FieldMode& f);

/// ||(d_y, |k|) g||_{L2}.
double hk1_norm(const FieldMode& g, int k, const ChebyshevGrid& grid);
double hk1_norm(const CVector& g, int k, const ChebyshevGrid& grid);

/// sqrt(<F, (k^2 - d_yy)^{-1} F>) with the Dirichlet inverse. Requires k != 0.
double hk_dual_norm(const FieldMode& F, int k, const ChebyshevGrid& grid);
double hk_dual_norm(const CVector& F, int k, const ChebyshevGrid& grid);

/// Throws InvalidArgument if the profile length does not match the grid.
void require_on_grid(const CVector& v, const ChebyshevGrid& grid, const char* what);

}  // namespace chanstab
