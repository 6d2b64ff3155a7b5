#pragma once

// Per-wavenumber linearized operators around plane Poiseuille flow U = (1 - y^2, 0).
//
//   orr_sommerfeld:      nu (k^2 - d_yy) + i k (1 - y^2) + 2 i k (d_yy - k^2)^{-1}
//   advection_diffusion: mu (k^2 - d_yy) + i k (1 - y^2)
//
// Both act on profiles vanishing at y = +-1 (vorticity under Navier-slip walls,
// temperature under Dirichlet walls). Two reduced operators, pure diffusion and
// pure shear, are exposed for analytic checks.

#include <utility>

#include "chanstab/spectral_core.hpp"

namespace chanstab {

enum class OperatorKind { orr_sommerfeld, advection_diffusion, diffusion, shear };

const char* to_string(OperatorKind kind);

/// Dense collocation matrix for one wavenumber. Rows 0 and n are identity rows
/// (homogeneous Dirichlet); every spectral quantity is taken on the interior
/// block, which is the operator restricted to profiles with zero wall values.
class ModeOperator {
 public:
  ModeOperator(OperatorKind kind, int k, double coeff, ChebyshevGrid grid, CMatrix matrix);

  OperatorKind kind() const noexcept { return kind_; }
  int k() const noexcept { return k_; }
  double coeff() const noexcept { return coeff_; }
  const ChebyshevGrid& grid() const noexcept { return grid_; }

  /// Full (n+1) x (n+1) matrix including the boundary rows.
  const CMatrix& matrix() const noexcept { return matrix_; }

  /// Interior block A_II, acting on nodes 1..n-1.
  CMatrix interior() const;

  /// W^{1/2} A_II W^{-1/2}: Euclidean norms of this matrix are quadrature L2 norms.
  const CMatrix& weighted() const noexcept { return weighted_; }

  /// Matrix-vector product; interior rows carry the operator action.
  CVector apply(const CVector& x) const;

  /// Solves (A + shift) x = b on the interior with x(+-1) = 0.
  CVector solve_shifted(Complex shift, const CVector& b) const;

 private:
  OperatorKind kind_;
  int k_;
  double coeff_;
  ChebyshevGrid grid_;
  CMatrix matrix_;
  CMatrix weighted_;
};

ModeOperator assemble_H(double mu, int k, const ChebyshevGrid& grid);
ModeOperator assemble_L(double nu, int k, const ChebyshevGrid& grid);

/// mu (k^2 - d_yy) alone: the self-adjoint reference operator.
ModeOperator assemble_diffusion(double mu, int k, const ChebyshevGrid& grid);

/// i k (1 - y^2) alone: the skew part of the shear operators.
ModeOperator assemble_shear(int k, const ChebyshevGrid& grid);

ModeOperator assemble(OperatorKind kind, double coeff, int k, const ChebyshevGrid& grid);

struct Velocity {
  FieldMode u1;
  FieldMode u2;
};

/// phi from (d_yy - k^2) phi = omega, phi(+-1) = 0; then u1 = d_y phi, u2 = -i k phi.
Velocity velocity_from_vorticity(const FieldMode& omega, int k, const ChebyshevGrid& grid);

/// Smallest eigenvalue of the Hermitian part of the weighted interior block, i.e.
/// min Re<A f, f> / <f, f> over profiles vanishing at the walls.
double accretivity_check(const ModeOperator& op);

/// Quadrature weights restricted to the interior nodes.
RVector interior_weights(const ChebyshevGrid& grid);

}  // namespace chanstab
